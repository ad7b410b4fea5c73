"""Tests layer for BI Assessment Accelerator."""

