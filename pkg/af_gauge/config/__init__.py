"""Configuration module for af-gauge."""
