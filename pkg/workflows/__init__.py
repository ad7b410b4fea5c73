"""Workflows layer: LangGraph wiring of experiment runs."""
