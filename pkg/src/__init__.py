"""Contextual Speed Controller - density- and proximity-aware speed limits from LIDAR/camera fusion."""
