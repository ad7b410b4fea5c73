"""Configuration layer for the impaired-observability RL toolkit."""
