"""Spectra of the PT-symmetric linear potential igx in hard and soft boxes."""
from .airy import AiryValues, airy_eval, airy_scaled

__all__ = ["AiryValues", "airy_eval", "airy_scaled"]
