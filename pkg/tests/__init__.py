"""Test suite for gramslice."""
