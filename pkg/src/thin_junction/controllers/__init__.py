"""Command controllers for the thin-junction toolkit."""
