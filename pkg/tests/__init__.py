"""Tests for the Dyadic RBMO Toolkit."""
