"""Integral cohomology: closed forms and a brute-force oracle."""
