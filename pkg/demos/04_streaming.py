"""
Streaming samples one at a time
===============================

Labels can be produced as the samples arrive. The streaming classifier
gives exactly the same labels as classifying the whole file at once.
"""

from freqact import StreamClassifier, classify_dataset, write_samples
from freqact.gen import default_corpus, synthesize

dataset, truth = synthesize(default_corpus(1, noise_sigma_g=0.05)[0])
lines = write_samples(dataset).splitlines()

# a corrupted line is reported and skipped without ending the session
lines.insert(300, "garbage")

session = StreamClassifier()
streamed = []
for line in lines:
    for event in session.feed_line(line):
        if hasattr(event, "kind"):
            streamed.append(event)
            print(event.row())
        else:
            print(f"# skipped {event.message}")

batch = classify_dataset(dataset).labels
print("identical to batch:", streamed == batch)
