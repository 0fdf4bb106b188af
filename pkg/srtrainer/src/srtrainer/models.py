"""Residual network architectures.

Both kinds map a single-channel patch to a same-shape residual and have
their final convolution zero-initialized, so an untrained model predicts
exactly zero residual and reconstruction degenerates to the plain
interpolation baseline.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import torch
from torch import nn


@dataclass(frozen=True)
class ArchSpec:
    """Network geometry; ``middle_layers`` counts conv+ReLU pairs (vdsr),
    ``resblocks``/``width`` size the toy edsr."""

    kind: str
    patch_size: int
    middle_layers: int = 18
    width: int = 64
    resblocks: int = 4

    def __post_init__(self):
        if self.kind not in ("vdsr", "edsr"):
            raise ValueError(f"unknown architecture kind {self.kind!r}")

    @staticmethod
    def vdsr() -> "ArchSpec":
        return ArchSpec(kind="vdsr", patch_size=41, middle_layers=18, width=64)

    @staticmethod
    def edsr_toy(width: int = 32, resblocks: int = 4) -> "ArchSpec":
        return ArchSpec(kind="edsr", patch_size=48, width=width, resblocks=resblocks)

    def to_dict(self) -> dict:
        return asdict(self)

    @staticmethod
    def from_dict(doc: dict) -> "ArchSpec":
        return ArchSpec(**doc)


class _ResBlock(nn.Module):
    def __init__(self, width: int):
        super().__init__()
        self.body = nn.Sequential(
            nn.Conv2d(width, width, 3, padding=1),
            nn.ReLU(inplace=True),
            nn.Conv2d(width, width, 3, padding=1),
        )

    def forward(self, x):
        return x + self.body(x)


def build_model(arch: ArchSpec) -> nn.Module:
    if arch.kind == "vdsr":
        layers: list[nn.Module] = [nn.Conv2d(1, arch.width, 3, padding=1), nn.ReLU(inplace=True)]
        for _ in range(arch.middle_layers):
            layers += [nn.Conv2d(arch.width, arch.width, 3, padding=1), nn.ReLU(inplace=True)]
        final = nn.Conv2d(arch.width, 1, 3, padding=1)
        layers.append(final)
        model = nn.Sequential(*layers)
    else:
        blocks = [nn.Conv2d(1, arch.width, 3, padding=1)]
        blocks += [_ResBlock(arch.width) for _ in range(arch.resblocks)]
        final = nn.Conv2d(arch.width, 1, 3, padding=1)
        blocks.append(final)
        model = nn.Sequential(*blocks)
    # He initialization keeps activations alive through the deep plain
    # stack; torch's conv default under-scales badly at this depth
    for module in model.modules():
        if isinstance(module, nn.Conv2d):
            nn.init.kaiming_normal_(module.weight, nonlinearity="relu")
            nn.init.zeros_(module.bias)
    nn.init.zeros_(final.weight)
    nn.init.zeros_(final.bias)
    return model


def predict_residual(model: nn.Module, patch) -> "torch.Tensor":
    """Residual for one (H, W) array or tensor; stays in float32."""
    x = torch.as_tensor(patch, dtype=torch.float32).reshape(1, 1, *patch.shape)
    model.eval()
    with torch.no_grad():
        return model(x)[0, 0]
