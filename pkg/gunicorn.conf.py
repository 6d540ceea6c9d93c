"""Gunicorn configuration for the Contextual Speed Controller service."""

import os

# Server socket
bind = f"{os.getenv('CSC_HOST', '0.0.0.0')}:{os.getenv('CSC_PORT', '8001')}"
backlog = 64

# Worker processes
workers = 2  # Controller is stateless per frame, workers only share read-only config
worker_class = "uvicorn.workers.UvicornWorker"
timeout = 30
graceful_timeout = 10

# Logging
accesslog = "-"
errorlog = "-"
loglevel = "info"

# Process naming
proc_name = "speed-controller"
