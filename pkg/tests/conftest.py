# makes this directory importable inside tests (shared oracle helpers)
