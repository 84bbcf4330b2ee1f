"""
Separating gravity from body motion
===================================

A high-pass elliptic filter at 0.5 Hz removes the slowly varying gravity
component so that only the wearer's own acceleration is left.
"""

import numpy as np

from freqact import design_gravity_filter, filter_apply

# the default 50 Hz design is a cascade of second-order sections
cascade = design_gravity_filter(50.0)
print(cascade.dump())

# magnitude response at a few frequencies of interest
freqs = np.array([0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 20.0])
with np.errstate(divide="ignore"):
    db = 20 * np.log10(np.abs(cascade.response(freqs)))
for f, d in zip(freqs, db):
    print(f"{f:6.2f} Hz  {d:8.2f} dB")

# a 2 Hz tone sitting on a 1 g offset: the offset disappears, the tone stays
t = np.arange(0, 20, 1 / 50)
x = 1.0 + 0.3 * np.sin(2 * np.pi * 2.0 * t)
y = filter_apply(cascade, x, initial="steady")
print("mean before", x.mean().round(4), "after", y[500:].mean().round(4))
print("amplitude after", np.abs(y[500:]).max().round(4))
