"""Fine-tune one critique model per element kind on the training JSONL."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import torch
from torch import nn
from torch.utils.data import DataLoader

from .data import Example, Vocab, load_examples
from .model import ModelDims, build_model, dims_dict

logger = logging.getLogger(__name__)

ARTIFACT_NAME = "model.pt"
LOSS_CURVE_NAME = "loss_curve.json"


@dataclass
class TrainerConfig:
    train_jsonl: str | Path
    output_dir: str | Path
    element_kind: str = "number"
    base_model: str = "tiny"
    learning_rate: float = 1e-5
    epochs: int = 5
    batch_size: int = 4
    max_input_tokens: int = 512
    max_output_tokens: int = 150
    seed: int = 0


@dataclass
class TrainResult:
    model_dir: Path
    epoch_losses: list[float] = field(default_factory=list)
    n_examples: int = 0


def _collate(vocab: Vocab, config: TrainerConfig):
    def collate(batch: list[Example]):
        sources = [vocab.encode(ex.input_text, limit=config.max_input_tokens) for ex in batch]
        targets = [
            [vocab.bos_id]
            + vocab.encode(ex.target_text, limit=config.max_output_tokens)
            + [vocab.eos_id]
            for ex in batch
        ]
        src_len = max(len(s) for s in sources)
        tgt_len = max(len(t) for t in targets)
        pad = vocab.pad_id
        src = torch.tensor([s + [pad] * (src_len - len(s)) for s in sources], dtype=torch.long)
        tgt = torch.tensor([t + [pad] * (tgt_len - len(t)) for t in targets], dtype=torch.long)
        return src, tgt

    return collate


def train(config: TrainerConfig) -> TrainResult:
    """Train one element kind's critique model; saves the artifact and loss curve.

    Requires at least one factual and one counterfactual instance of the kind.
    """
    examples = load_examples(config.train_jsonl, element_kind=config.element_kind)
    labels_present = {example.label for example in examples}
    if labels_present != {"factual", "counterfactual"}:
        raise ValueError(
            f"{config.element_kind!r} training needs at least one factual and one "
            f"counterfactual instance; found labels {sorted(labels_present)}"
        )
    logger.info("training %s critic on %d instances", config.element_kind, len(examples))

    torch.manual_seed(config.seed)
    vocab = Vocab.from_examples(examples)
    model = build_model(len(vocab), config.base_model)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    loss_fn = nn.CrossEntropyLoss(ignore_index=vocab.pad_id)
    loader = DataLoader(
        examples,
        batch_size=config.batch_size,
        shuffle=True,
        generator=torch.Generator().manual_seed(config.seed),
        collate_fn=_collate(vocab, config),
    )

    epoch_losses: list[float] = []
    model.train()
    for epoch in range(config.epochs):
        total = 0.0
        batches = 0
        for src, tgt in loader:
            optimizer.zero_grad()
            src_pad = src == vocab.pad_id
            tgt_in, tgt_out = tgt[:, :-1], tgt[:, 1:]
            logits = model(src, tgt_in, src_pad_mask=src_pad, tgt_pad_mask=tgt_in == vocab.pad_id)
            loss = loss_fn(logits.reshape(-1, logits.size(-1)), tgt_out.reshape(-1))
            loss.backward()
            optimizer.step()
            total += loss.item()
            batches += 1
        epoch_losses.append(total / batches)
        logger.info("epoch %d mean loss %.6f", epoch + 1, epoch_losses[-1])

    kind_dir = Path(config.output_dir) / config.element_kind
    kind_dir.mkdir(parents=True, exist_ok=True)
    torch.save(
        {
            "state_dict": model.state_dict(),
            "vocab": vocab.itos,
            "dims": dims_dict(model),
            "element_kind": config.element_kind,
            "base_model": config.base_model,
            "max_input_tokens": config.max_input_tokens,
            "max_output_tokens": config.max_output_tokens,
        },
        kind_dir / ARTIFACT_NAME,
    )
    (kind_dir / LOSS_CURVE_NAME).write_text(
        json.dumps({"epoch_mean_loss": epoch_losses}, indent=2) + "\n", encoding="utf-8"
    )
    return TrainResult(model_dir=kind_dir, epoch_losses=epoch_losses, n_examples=len(examples))


def load_artifact(kind_dir: str | Path):
    """Rebuild (model, vocab, meta) from a saved artifact directory."""
    payload = torch.load(Path(kind_dir) / ARTIFACT_NAME, map_location="cpu", weights_only=False)
    vocab = Vocab(payload["vocab"])
    vocab.itos = payload["vocab"]
    vocab.stoi = {token: index for index, token in enumerate(vocab.itos)}
    model = build_model(len(vocab), payload["base_model"])
    model.load_state_dict(payload["state_dict"])
    model.eval()
    meta = {
        "element_kind": payload["element_kind"],
        "max_input_tokens": payload["max_input_tokens"],
        "max_output_tokens": payload["max_output_tokens"],
    }
    return model, vocab, meta
