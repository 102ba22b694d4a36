"""End-to-end tests: certified bounds over many systems, swing sweeps and the installed CLI."""
