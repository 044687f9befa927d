# Backend package - exact 3j oracle, screen solvers, semiclassics, CLI and service
