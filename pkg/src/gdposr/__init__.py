"""gdposr: desk-scale group-preference fine-tuning for a one-step SR model.

The package is organized around five areas:

- ``numcore``    tape-based reverse-mode autodiff over numpy plus AdamW
- ``imagecore``  Netpbm I/O, synthetic degradation, metrics, region analysis
- ``diffusion``  coefficient schedule, the noise-aware one-step restorer,
                 group sampling and the pretraining objective
- ``gdpo``       attribute-aware rewards, group-relative advantages and the
                 group preference loss
- ``harness``    configs, dataset synthesis, training/eval drivers, CLI
"""

__version__ = "0.1.0"
