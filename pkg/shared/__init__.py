# Shared utilities for stochastica
