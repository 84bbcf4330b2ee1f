"""
Classifying a synthetic corpus
==============================

Seventeen generated recordings run through REST, WALK and RUN in that order.
Every block is classified and compared with the generator's labels.
"""

from freqact import classify_dataset, report, score
from freqact.gen import default_corpus, synthesize

scripts = default_corpus(17, noise_sigma_g=0.05)

matrices = []
for i, script in enumerate(scripts):
    dataset, truth = synthesize(script)
    result = classify_dataset(dataset)
    matrices.append((f"set_{i:02d}", score(result.labels, truth)))

# the per-dataset columns are pooled into the last column
rep = report(matrices, block_size=64, sample_rate_hz=50.0)
print(rep.render_text())

# where do the errors come from?
total = matrices[0][1]
for _, cm in matrices[1:]:
    total = total + cm
print(total.render())
