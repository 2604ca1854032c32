#!/usr/bin/env python3
# Copyright 2026 The text2video Authors.
# SPDX-License-Identifier: Apache-2.0
"""TorchScript image-to-image denoiser adapter.

Expects a scripted generator mapping 1x3xHxW in [-1, 1] to the same shape
and range, as CycleGAN generators are trained. Frames are reflect-padded
to a multiple of 4 for the down/up-sampling stages and cropped back.
"""

import numpy as np

import t2v_protocol as proto


class Denoiser:
    def hello(self, header, _payload):
        import torch

        self.torch = torch
        self.device = proto.select_device(torch, header.get("device", "cpu"))
        self.model = torch.jit.load(header["weights"], map_location=self.device).eval()
        note = "HxWx3 RGB in [0, 1], mapped to [-1, 1] for the generator"
        return {"name": f"torchscript:{header['weights']}", "input_note": note, "device": self.device}, None

    def denoise(self, header, payload):
        torch = self.torch
        h, w = int(header["height"]), int(header["width"])
        x = torch.tensor(np.asarray(payload).reshape(1, h, w, 3), dtype=torch.float32, device=self.device)
        x = x.permute(0, 3, 1, 2) * 2.0 - 1.0
        ph, pw = (-h) % 4, (-w) % 4
        if ph or pw:
            x = torch.nn.functional.pad(x, (0, pw, 0, ph), mode="reflect")
        with torch.no_grad():
            y = self.model(x)
        y = ((y[:, :, :h, :w] + 1.0) / 2.0).clamp(0.0, 1.0)
        out = y.permute(0, 2, 3, 1)[0].double().cpu().numpy()
        return {"height": h, "width": w}, out.reshape(-1)


def main():
    d = Denoiser()
    proto.serve({"hello": d.hello, "denoise": d.denoise})


if __name__ == "__main__":
    main()
