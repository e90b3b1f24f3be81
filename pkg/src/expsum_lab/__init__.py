"""Exponential sums on affine space over finite fields."""
