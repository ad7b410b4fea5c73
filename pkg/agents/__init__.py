"""Agents layer: async workflow nodes of an experiment run."""
