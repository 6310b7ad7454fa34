"""RIS-assisted mmWave beamforming and association with soft actor-critic."""
__version__ = "0.1.0"
