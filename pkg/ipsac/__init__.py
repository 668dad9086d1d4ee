"""Trajectory and precoder planning for a UAV that periodically senses a target while serving a user."""

__version__ = "1.0.0"
