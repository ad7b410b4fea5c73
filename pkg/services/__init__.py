"""Services layer: planning, augmented MDPs, learners, oracles and result writers."""
