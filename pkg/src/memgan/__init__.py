"""Behavioral simulator of an analog memristive DCGAN accelerator.

Trains a small GAN whose forward passes run through modeled memristive
crossbars (quantized conductance levels, device variability, load-memristor
readout, leakage) and computes the accelerator's training-time, write-power
and CMOS area/power budgets for four update-scheduling schemes.
"""

from memgan.device import DeviceSpec, VariabilityModel
from memgan.crossbar import CrossbarArray, ReadoutMode

__all__ = ["DeviceSpec", "VariabilityModel", "CrossbarArray", "ReadoutMode"]
__version__ = "0.1.0"
