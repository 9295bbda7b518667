"""Hypergeometric functions for root systems with negative multiplicities."""
