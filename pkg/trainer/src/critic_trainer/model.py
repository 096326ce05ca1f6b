"""A small from-scratch encoder-decoder transformer for critique generation.

The "tiny" base model trains in seconds on CPU over toy data. Swapping in a
large pretrained seq2seq behind the same train/serve surface is a deployment
choice, not something the tests depend on.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import torch
from torch import nn

BASE_MODELS = {
    "tiny": dict(d_model=64, nhead=4, num_layers=1, dim_feedforward=128, dropout=0.0),
    "small": dict(d_model=128, nhead=4, num_layers=2, dim_feedforward=256, dropout=0.1),
}


@dataclass(frozen=True)
class ModelDims:
    d_model: int
    nhead: int
    num_layers: int
    dim_feedforward: int
    dropout: float


class CritiqueModel(nn.Module):
    def __init__(self, vocab_size: int, dims: ModelDims, max_len: int = 1024) -> None:
        super().__init__()
        self.dims = dims
        self.embed = nn.Embedding(vocab_size, dims.d_model)
        self.pos = nn.Embedding(max_len, dims.d_model)
        self.transformer = nn.Transformer(
            d_model=dims.d_model,
            nhead=dims.nhead,
            num_encoder_layers=dims.num_layers,
            num_decoder_layers=dims.num_layers,
            dim_feedforward=dims.dim_feedforward,
            dropout=dims.dropout,
            batch_first=True,
        )
        self.out = nn.Linear(dims.d_model, vocab_size)
        self.max_len = max_len

    def _embed(self, ids: torch.Tensor) -> torch.Tensor:
        positions = torch.arange(ids.size(1), device=ids.device).clamp(max=self.max_len - 1)
        return self.embed(ids) + self.pos(positions)[None, :, :]

    def forward(
        self,
        src: torch.Tensor,
        tgt: torch.Tensor,
        src_pad_mask: torch.Tensor | None = None,
        tgt_pad_mask: torch.Tensor | None = None,
    ) -> torch.Tensor:
        causal = torch.triu(
            torch.ones(tgt.size(1), tgt.size(1), dtype=torch.bool, device=tgt.device),
            diagonal=1,
        )
        hidden = self.transformer(
            self._embed(src),
            self._embed(tgt),
            tgt_mask=causal,
            src_key_padding_mask=src_pad_mask,
            tgt_key_padding_mask=tgt_pad_mask,
            memory_key_padding_mask=src_pad_mask,
        )
        return self.out(hidden)

    @torch.no_grad()
    def generate(self, src_ids: list[int], bos_id: int, eos_id: int, max_tokens: int) -> list[int]:
        self.eval()
        src = torch.tensor([src_ids], dtype=torch.long)
        generated = [bos_id]
        for _ in range(max_tokens):
            tgt = torch.tensor([generated], dtype=torch.long)
            logits = self.forward(src, tgt)
            next_id = int(logits[0, -1].argmax())
            if next_id == eos_id:
                break
            generated.append(next_id)
        return generated[1:]


def build_model(vocab_size: int, base_model: str) -> CritiqueModel:
    if base_model not in BASE_MODELS:
        raise ValueError(f"unknown base model {base_model!r}; choose from {sorted(BASE_MODELS)}")
    return CritiqueModel(vocab_size, ModelDims(**BASE_MODELS[base_model]))


def dims_dict(model: CritiqueModel) -> dict:
    return asdict(model.dims)
