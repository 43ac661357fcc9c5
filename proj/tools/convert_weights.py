#!/usr/bin/env python3
# Copyright 2026 The vsa authors
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Convert torchvision ImageNet backbone weights into the .vsw container.

The C++ pipeline loads pretrained feature extractors from
`<weights-dir>/<backbone>.vsw`. This script produces those files from
torchvision's inception_v3 / vgg19 models, whose feature-extractor layout
matches the built-in backbones tensor for tensor.

    python3 tools/convert_weights.py --backbone inception_v3 --out weights/
    python3 tools/convert_weights.py --backbone vgg19 --out weights/

Requires torch + torchvision. Pass --random to skip the pretrained download
and export a randomly initialized extractor (useful for smoke tests).
"""

import argparse
import re
import struct
import sys
from pathlib import Path

MAGIC = b"VSAW"
VERSION = 1

# conv layer index in torchvision's vgg19 `features` -> block naming here
VGG19_CONV_NAMES = {
    0: "conv1_1", 2: "conv1_2",
    5: "conv2_1", 7: "conv2_2",
    10: "conv3_1", 12: "conv3_2", 14: "conv3_3", 16: "conv3_4",
    19: "conv4_1", 21: "conv4_2", 23: "conv4_3", 25: "conv4_4",
    28: "conv5_1", 30: "conv5_2", 32: "conv5_3", 34: "conv5_4",
}


def map_inception_name(name: str) -> str | None:
    """torchvision inception_v3 tensor name -> vsa backbone tensor name."""
    if name.startswith(("fc.", "AuxLogits.")) or name.endswith("num_batches_tracked"):
        return None
    # Fan-out pairs inside the mixed 7b/7c blocks.
    name = name.replace("branch3x3_2a", "branch3x3.split.a")
    name = name.replace("branch3x3_2b", "branch3x3.split.b")
    name = name.replace("branch3x3dbl_3a", "branch3x3dbl.split.a")
    name = name.replace("branch3x3dbl_3b", "branch3x3dbl.split.b")
    # Pool branches carry an explicit conv child here.
    name = name.replace("branch_pool.conv.", "branch_pool.conv.conv.")
    name = name.replace("branch_pool.bn.", "branch_pool.conv.bn.")
    # Numbered branch stages: branch5x5_2 -> branch5x5.1 etc.
    name = re.sub(r"(branch[0-9a-z]+(?:dbl)?)_(\d)\.",
                  lambda m: f"{m.group(1)}.{int(m.group(2)) - 1}.", name)
    name = name.replace(".bn.weight", ".bn.gamma").replace(".bn.bias", ".bn.beta")
    return "backbone." + name


def map_vgg19_name(name: str) -> str | None:
    if name.startswith("classifier."):
        return None
    m = re.fullmatch(r"features\.(\d+)\.(weight|bias)", name)
    if not m:
        return None
    conv = VGG19_CONV_NAMES[int(m.group(1))]
    return f"backbone.{conv}.{m.group(2)}"


def write_vsw(path: Path, tensors: dict[str, "torch.Tensor"]) -> None:
    with open(path, "wb") as out:
        out.write(MAGIC)
        out.write(struct.pack("<II", VERSION, len(tensors)))
        for name, tensor in tensors.items():
            data = tensor.detach().cpu().float().contiguous()
            dims = list(data.shape) + [1] * (4 - data.dim())
            if len(dims) != 4:
                raise ValueError(f"{name}: rank {data.dim()} > 4 unsupported")
            encoded = name.encode()
            out.write(struct.pack("<I", len(encoded)))
            out.write(encoded)
            out.write(struct.pack("<5I", 4, *dims))
            out.write(data.numpy().tobytes())


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--backbone", required=True, choices=["inception_v3", "vgg19"])
    parser.add_argument("--out", default="weights", help="output directory")
    parser.add_argument("--random", action="store_true",
                        help="export random initialization instead of ImageNet weights")
    args = parser.parse_args()

    import torchvision  # deferred so --help works without torch

    weights = None if args.random else "IMAGENET1K_V1"
    if args.backbone == "inception_v3":
        model = torchvision.models.inception_v3(weights=weights, init_weights=args.random)
        mapper = map_inception_name
    else:
        model = torchvision.models.vgg19(weights=weights)
        mapper = map_vgg19_name
    model.eval()

    tensors = {}
    for name, value in list(model.named_parameters()) + list(model.named_buffers()):
        mapped = mapper(name)
        if mapped is not None:
            tensors[mapped] = value

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"{args.backbone}.vsw"
    write_vsw(out_path, tensors)
    print(f"wrote {len(tensors)} tensors to {out_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
