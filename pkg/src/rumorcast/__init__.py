"""Backbone construction and rumor broadcast scheduling for radio networks."""

__version__ = "0.1.0"
