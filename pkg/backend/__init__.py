# szego-lab backend: CLI driver, configuration, logging and report writers
__version__ = "0.3.0"
