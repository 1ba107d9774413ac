"""sksflow: check deep-inference (SKS) derivations, extract their atomic
flows, rewrite the flows, and lift every flow rewrite back to a sound
derivation transformation (streamlining and cut elimination included)."""

__version__ = "0.1.0"
