import json

import pytest

from critic_trainer import TrainerConfig, load_artifact, train
from critic_trainer.train import ARTIFACT_NAME, LOSS_CURVE_NAME


class TestTraining:
    def test_five_epochs_at_default_lr_reduce_mean_loss(self, toy_jsonl, tmp_path):
        config = TrainerConfig(
            train_jsonl=toy_jsonl,
            output_dir=tmp_path / "models",
            element_kind="number",
            learning_rate=1e-5,
            epochs=5,
            seed=3,
        )
        result = train(config)
        assert len(result.epoch_losses) == 5
        assert result.epoch_losses[-1] < result.epoch_losses[0]

    def test_artifact_and_loss_curve_saved_and_loadable(self, toy_jsonl, tmp_path):
        config = TrainerConfig(
            train_jsonl=toy_jsonl, output_dir=tmp_path / "models", element_kind="entity",
            epochs=1,
        )
        result = train(config)
        assert (result.model_dir / ARTIFACT_NAME).exists()
        curve = json.loads((result.model_dir / LOSS_CURVE_NAME).read_text())
        assert len(curve["epoch_mean_loss"]) == 1
        model, vocab, meta = load_artifact(result.model_dir)
        assert meta["element_kind"] == "entity"
        ids = model.generate(vocab.encode("critique entity | claim: x"), vocab.bos_id, vocab.eos_id, 8)
        assert isinstance(vocab.decode(ids), str)

    def test_kind_filter_counts_only_that_kind(self, toy_jsonl, tmp_path, caplog):
        config = TrainerConfig(
            train_jsonl=toy_jsonl, output_dir=tmp_path / "models", element_kind="topic",
            epochs=1,
        )
        with caplog.at_level("INFO"):
            result = train(config)
        assert result.n_examples == 8  # 4 factual + 4 counterfactual topic rows
        assert any("8 instances" in record.message for record in caplog.records)

    def test_training_requires_both_labels(self, tmp_path):
        path = tmp_path / "onesided.jsonl"
        record = {
            "id": "a", "claim": "c", "evidence": "e", "explanation_variant": "x",
            "critique": "The numbers are correct", "element_kind": "number",
            "label": "factual", "replacement": None,
        }
        path.write_text(json.dumps(record) + "\n", encoding="utf-8")
        with pytest.raises(ValueError, match="factual and one counterfactual"):
            train(TrainerConfig(train_jsonl=path, output_dir=tmp_path / "m", element_kind="number"))
