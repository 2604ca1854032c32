#!/usr/bin/env python3
# Copyright 2026 The text2video Authors.
# SPDX-License-Identifier: Apache-2.0
"""CLIP guidance adapter.

Loads a Hugging Face CLIP checkpoint directory (config, weights, tokenizer)
and answers embed_text, embed_images and score_views requests. Views arrive
as HxWx3 float64 RGB in [0, 1]; resizing to the vision tower's resolution
and CLIP's mean/std normalization happen here, inside the autograd graph.
"""

import numpy as np

import t2v_protocol as proto

CLIP_MEAN = (0.48145466, 0.4578275, 0.40821073)
CLIP_STD = (0.26862954, 0.26130258, 0.27577711)


def _features(output):
    # Newer transformers releases may wrap projected features in a model output.
    if hasattr(output, "pooler_output") and not hasattr(output, "shape"):
        return output.pooler_output
    return output


class ClipScorer:
    def __init__(self):
        self.torch = None
        self.model = None

    def hello(self, header, _payload):
        import torch
        from transformers import CLIPModel, CLIPTokenizer

        self.torch = torch
        torch.set_num_threads(max(1, torch.get_num_threads()))
        self.device = proto.select_device(torch, header.get("device", "cpu"))
        path = header["weights"]
        self.model = CLIPModel.from_pretrained(path).to(self.device).eval()
        for p in self.model.parameters():
            p.requires_grad_(False)
        self.tokenizer = CLIPTokenizer.from_pretrained(path)
        self.size = int(self.model.config.vision_config.image_size)
        self.mean = torch.tensor(CLIP_MEAN, device=self.device).view(1, 3, 1, 1)
        self.std = torch.tensor(CLIP_STD, device=self.device).view(1, 3, 1, 1)
        dim = int(self.model.config.projection_dim)
        return {"name": f"clip:{path}", "embedding_dim": dim, "device": self.device}, None

    def _encode_images(self, batch):
        torch = self.torch
        x = batch.permute(0, 3, 1, 2)
        if x.shape[-1] != self.size or x.shape[-2] != self.size:
            x = torch.nn.functional.interpolate(x, size=(self.size, self.size), mode="bilinear",
                                                align_corners=False)
        x = (x - self.mean) / self.std
        f = _features(self.model.get_image_features(pixel_values=x))
        return f / f.norm(dim=-1, keepdim=True)

    def embed_text(self, header, _payload):
        torch = self.torch
        tokens = self.tokenizer([header["text"]], padding=True, truncation=True, return_tensors="pt")
        tokens = {k: v.to(self.device) for k, v in tokens.items()}
        with torch.no_grad():
            f = _features(self.model.get_text_features(**tokens))
        f = f / f.norm(dim=-1, keepdim=True)
        return {}, f[0].double().cpu().numpy()

    def _views(self, header, payload, count):
        h, w = int(header["height"]), int(header["width"])
        pixels = np.asarray(payload[: count * h * w * 3]).reshape(count, h, w, 3)
        return self.torch.tensor(pixels, dtype=self.torch.float32, device=self.device), h, w

    def embed_images(self, header, payload):
        views, _, _ = self._views(header, payload, int(header.get("count", 1)))
        with self.torch.no_grad():
            f = self._encode_images(views)
        return {}, f[0].double().cpu().numpy()

    def score_views(self, header, payload):
        torch = self.torch
        count = int(header["count"])
        weights = header["weights"]
        views, h, w = self._views(header, payload, count)
        views.requires_grad_(True)
        dim = int(self.model.config.projection_dim)
        offset = count * h * w * 3
        prompts = np.asarray(payload[offset: offset + dim * len(weights)]).reshape(len(weights), dim)
        text = torch.tensor(prompts, dtype=torch.float32, device=self.device)
        wt = torch.tensor(weights, dtype=torch.float32, device=self.device)
        f = self._encode_images(views)
        values = ((1.0 - f @ text.T) * wt).sum(dim=1)
        values.sum().backward()
        grads = views.grad.double().cpu().numpy()
        return {"values": values.double().detach().cpu().tolist()}, grads.reshape(-1)


def main():
    s = ClipScorer()
    proto.serve({"hello": s.hello, "embed_text": s.embed_text, "embed_images": s.embed_images,
                 "score_views": s.score_views})


if __name__ == "__main__":
    main()
