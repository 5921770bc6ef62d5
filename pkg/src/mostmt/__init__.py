"""Czech-Ukrainian translation serving platform.

Direct (non-pivot) translation routing with a pluggable backend contract,
Czech-oriented Cyrillic/Latin transliteration, an HTTP gateway with batching
and usage statistics, opt-in privacy-preserving logging, parallel-corpus
tooling, and BLEU/chrF evaluation.
"""

__version__ = "0.1.0"
