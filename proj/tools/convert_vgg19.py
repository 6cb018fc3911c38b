#!/usr/bin/env python3
# SPDX-FileCopyrightText: Copyright (c) 2026 The AEANet Authors. All rights reserved.
# SPDX-License-Identifier: Apache-2.0
"""Convert torchvision VGG-19 weights into the safetensors layout used by aeanet.

    aeanet-convert-vgg19 vgg19-dcbb9e9d.pth vgg19.safetensors

Entries are named conv{block}_{index}.weight / .bias for the 13 convolutions
up to conv5_1. Kernels stay in OIHW order with RGB input channels.
"""
import argparse
import sys

import torch
from safetensors.torch import save_file

# Index of each conv inside torchvision's vgg19().features.
_FEATURE_INDEX = {
    "conv1_1": 0, "conv1_2": 2,
    "conv2_1": 5, "conv2_2": 7,
    "conv3_1": 10, "conv3_2": 12, "conv3_3": 14, "conv3_4": 16,
    "conv4_1": 19, "conv4_2": 21, "conv4_3": 23, "conv4_4": 25,
    "conv5_1": 28,
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("src", help="torchvision state_dict (.pth)")
    ap.add_argument("dst", help="output .safetensors")
    args = ap.parse_args(argv)

    state = torch.load(args.src, map_location="cpu")
    if "state_dict" in state:
        state = state["state_dict"]
    out = {}
    for name, idx in _FEATURE_INDEX.items():
        for part in ("weight", "bias"):
            key = f"features.{idx}.{part}"
            if key not in state:
                print(f"missing {key} in {args.src}", file=sys.stderr)
                return 1
            out[f"{name}.{part}"] = state[key].float().contiguous()
    save_file(out, args.dst, metadata={"format": "aeanet-vgg19"})
    return 0


if __name__ == "__main__":
    sys.exit(main())
