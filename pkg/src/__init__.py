"""DDForge: divisible designs from chain geometries over twisted dual numbers."""
