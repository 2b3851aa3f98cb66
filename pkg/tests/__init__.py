"""Tests for chaplygin-kit."""
