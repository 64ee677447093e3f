"""
Shipped data files: default taxonomy, default lexicon and the sample corpus.
"""
