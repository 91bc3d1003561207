import json

import numpy as np
import pytest

from dytagkd.cli import (
    EXIT_CACHE,
    EXIT_CONFIG,
    EXIT_DATA,
    EXIT_OK,
    GOLDEN_PROMPTS_FILE,
    NEGATIVE_PROMPTS_FILE,
    build_config,
    load_config_file,
    main,
    required_texts,
)
from dytagkd.embed import (
    LINK_PROMPTS_EMB,
    NEIGHBOR_PROMPTS_EMB,
    NODE_TEXT_EMB,
    RELATION_TEXT_EMB,
    EmbeddingCache,
    dataset_prompts,
    load_embeddings,
    text_key,
    unescape_prompt_line,
)
from dytagkd.errors import ConfigError
from dytagkd.ingest import load_dataset
from dytagkd.nn import load_checkpoint
from dytagkd.train import TrainConfig

SYNTH = [
    "ingest", "--synthetic", "--communities", "2", "--community-size", "4",
    "--timesteps", "5", "--k", "1", "--intra", "0.5", "--inter", "0.1",
    "--labels", "2", "--seed", "3",
]

FAST = ["--epochs", "2", "--batch-size", "64", "--seed", "1"]


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    out = tmp_path_factory.mktemp("data") / "toy"
    assert main(SYNTH + ["--out", str(out)]) == EXIT_OK
    return out


class TestIngest:
    def test_synthetic_writes_loadable_dataset(self, dataset):
        g = load_dataset(dataset, future_horizon=1)
        assert g.node_count == 8
        assert g.num_edges > 0

    def test_normalize_existing(self, dataset, tmp_path):
        out = tmp_path / "copy"
        assert main(["ingest", "--dataset", str(dataset), "--out", str(out)]) == EXIT_OK
        for name in ("edge_list.csv", "entity_text.csv", "relation_text.csv"):
            assert (out / name).read_bytes() == (dataset / name).read_bytes()

    def test_requires_exactly_one_source(self, dataset, tmp_path):
        assert main(["ingest", "--out", str(tmp_path / "x")]) == EXIT_CONFIG
        both = ["ingest", "--synthetic", "--dataset", str(dataset),
                "--out", str(tmp_path / "x")]
        assert main(both) == EXIT_CONFIG

    def test_bad_parameters(self, tmp_path):
        argv = ["ingest", "--synthetic", "--communities", "0", "--out", str(tmp_path / "x")]
        assert main(argv) == EXIT_CONFIG

    def test_missing_dataset(self, tmp_path):
        argv = ["ingest", "--dataset", str(tmp_path / "absent"), "--out", str(tmp_path / "x")]
        assert main(argv) == EXIT_DATA

    def test_malformed_dataset(self, tmp_path):
        bad = tmp_path / "bad"
        bad.mkdir()
        (bad / "edge_list.csv").write_text("src,dst,relation_id,timestamp,label\n0,1\n")
        (bad / "entity_text.csv").write_text("id,text\n0,a\n1,b\n")
        (bad / "relation_text.csv").write_text("id,text\n0,r\n")
        argv = ["ingest", "--dataset", str(bad), "--out", str(tmp_path / "x")]
        assert main(argv) == EXIT_DATA


class TestArgs:
    def test_no_command(self):
        assert main([]) == EXIT_CONFIG

    def test_unknown_command(self):
        assert main(["frobnicate"]) == EXIT_CONFIG

    def test_bad_task_choice(self, dataset, tmp_path):
        argv = ["train", "--dataset", str(dataset), "--task", "nope",
                "--out", str(tmp_path)]
        assert main(argv) == EXIT_CONFIG

    def test_bad_provider_spec(self, dataset, tmp_path):
        argv = ["train", "--dataset", str(dataset), "--k", "1", "--task", "flp",
                "--out", str(tmp_path), "--provider", "carrier-pigeon"] + FAST
        assert main(argv) == EXIT_CONFIG


class TestConfigFile:
    def test_load_and_merge(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"epochs": 9, "lambda_kd": 0.5,
                                    "split": [0.6, 0.2, 0.2]}))
        cfg, raw = build_config(str(path), {"seed": 5, "epochs": None})
        assert cfg.epochs == 9
        assert cfg.lambda_kd == 0.5
        assert cfg.seed == 5
        assert cfg.split.ratios == (0.6, 0.2, 0.2)
        assert raw["epochs"] == 9

    def test_override_wins(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"epochs": 9}))
        cfg, _ = build_config(str(path), {"epochs": 3})
        assert cfg.epochs == 3

    def test_unknown_keys_rejected(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"epochz": 9}))
        with pytest.raises(ConfigError):
            load_config_file(str(path))

    def test_not_json(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text("{broken")
        with pytest.raises(ConfigError):
            load_config_file(str(path))

    def test_missing_file(self):
        with pytest.raises(ConfigError):
            load_config_file("/nonexistent/cfg.json")

    def test_invalid_values_exit_config(self, dataset, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"epochs": 0}))
        argv = ["train", "--dataset", str(dataset), "--k", "1", "--task", "flp",
                "--out", str(tmp_path / "out"), "--config", str(path)]
        assert main(argv) == EXIT_CONFIG


class TestEmbedCache:
    def test_hash_cache_layout(self, dataset, tmp_path):
        cache_dir = tmp_path / "cache"
        argv = ["embed-cache", "--dataset", str(dataset), "--k", "1",
                "--out", str(cache_dir)] + FAST
        assert main(argv) == EXIT_OK
        g = load_dataset(dataset, 1)
        cfg = TrainConfig(epochs=2, batch_size=64, seed=1)
        needed = required_texts(g, cfg)
        for fname in (NODE_TEXT_EMB, RELATION_TEXT_EMB,
                      NEIGHBOR_PROMPTS_EMB, LINK_PROMPTS_EMB):
            dim, mapping = load_embeddings(cache_dir / fname)
            assert set(mapping) == {text_key(t) for t in needed[fname]}
            expected_dim = cfg.d_enc if fname in (NODE_TEXT_EMB, RELATION_TEXT_EMB) else cfg.d_llm
            assert dim == expected_dim

    def test_prompt_manifests(self, dataset, tmp_path):
        cache_dir = tmp_path / "cache"
        argv = ["embed-cache", "--dataset", str(dataset), "--k", "1",
                "--out", str(cache_dir)] + FAST
        assert main(argv) == EXIT_OK
        g = load_dataset(dataset, 1)
        golden = (cache_dir / GOLDEN_PROMPTS_FILE).read_text().split("\n")[:-1]
        assert [unescape_prompt_line(ln) for ln in golden] == dataset_prompts(g)
        negatives = (cache_dir / NEGATIVE_PROMPTS_FILE).read_text().split("\n")[:-1]
        assert negatives
        assert all(unescape_prompt_line(ln).startswith("There is no edge") for ln in negatives)

    def test_verify_mode_passes_on_own_output(self, dataset, tmp_path):
        cache_dir = tmp_path / "cache"
        base = ["embed-cache", "--dataset", str(dataset), "--k", "1"] + FAST
        assert main(base + ["--out", str(cache_dir)]) == EXIT_OK
        assert main(base + ["--provider", f"file:{cache_dir}"]) == EXIT_OK

    def test_verify_mode_rejects_incomplete_cache(self, dataset, tmp_path):
        cache_dir = tmp_path / "cache"
        base = ["embed-cache", "--dataset", str(dataset), "--k", "1"] + FAST
        assert main(base + ["--out", str(cache_dir)]) == EXIT_OK
        # drop one entry from the link-prompt cache
        dim, mapping = load_embeddings(cache_dir / LINK_PROMPTS_EMB)
        mapping.pop(sorted(mapping)[0])
        EmbeddingCache(dim, mapping).save(cache_dir / LINK_PROMPTS_EMB)
        assert main(base + ["--provider", f"file:{cache_dir}"]) == EXIT_CACHE

    def test_verify_mode_missing_dir(self, dataset, tmp_path):
        argv = ["embed-cache", "--dataset", str(dataset), "--k", "1",
                "--provider", f"file:{tmp_path / 'absent'}"] + FAST
        assert main(argv) == EXIT_CACHE

    def test_hash_mode_requires_out(self, dataset):
        argv = ["embed-cache", "--dataset", str(dataset), "--k", "1"] + FAST
        assert main(argv) == EXIT_CONFIG


class TestTrain:
    def test_end_to_end_hash(self, dataset, tmp_path):
        out = tmp_path / "out"
        argv = ["train", "--dataset", str(dataset), "--k", "1", "--task", "flp",
                "--out", str(out)] + FAST
        assert main(argv) == EXIT_OK
        report = json.loads((out / "report_toy_flp_s1.json").read_text())
        assert report["task"] == "flp"
        assert report["provider"] == "hash"
        assert len(report["loss_curve"]) == 2
        assert (out / "report_toy_flp_s1.csv").is_file()
        params = load_checkpoint(out / "model_toy_flp_s1.ckpt")
        assert any(k.startswith("node_mlp.") for k in params)

    def test_train_with_file_provider(self, dataset, tmp_path):
        cache_dir = tmp_path / "cache"
        argv = ["embed-cache", "--dataset", str(dataset), "--k", "1",
                "--out", str(cache_dir)] + FAST
        assert main(argv) == EXIT_OK

        out_hash, out_a, out_b = tmp_path / "hash", tmp_path / "a", tmp_path / "b"
        base = ["train", "--dataset", str(dataset), "--k", "1", "--task", "flp"] + FAST
        assert main(base + ["--out", str(out_hash)]) == EXIT_OK
        assert main(base + ["--out", str(out_a),
                            "--provider", f"file:{cache_dir}"]) == EXIT_OK
        assert main(base + ["--out", str(out_b),
                            "--provider", f"file:{cache_dir}"]) == EXIT_OK

        # repeated file-provider runs are byte-identical
        name = "report_toy_flp_s1.json"
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()
        p_a = load_checkpoint(out_a / "model_toy_flp_s1.ckpt")
        p_b = load_checkpoint(out_b / "model_toy_flp_s1.ckpt")
        for k in p_a:
            assert np.array_equal(p_a[k], p_b[k]), k

        # the cache stores 9 significant digits, so file-provider numbers
        # track the hash run only up to quantization noise
        r_hash = json.loads((out_hash / name).read_text())
        r_file = json.loads((out_a / name).read_text())
        assert r_file["provider"] == f"file:{cache_dir}"
        for e_hash, e_file in zip(r_hash["loss_curve"], r_file["loss_curve"]):
            assert e_file["total"] == pytest.approx(e_hash["total"], rel=1e-6)

    def test_ec_task(self, dataset, tmp_path):
        out = tmp_path / "out"
        argv = ["train", "--dataset", str(dataset), "--k", "1", "--task", "ec",
                "--out", str(out)] + FAST
        assert main(argv) == EXIT_OK
        report = json.loads((out / "report_toy_ec_s1.json").read_text())
        assert "weighted_f1" in report["metrics"]["test"]["transductive"]

    def test_dim_conflict_with_cache(self, dataset, tmp_path):
        cache_dir = tmp_path / "cache"
        argv = ["embed-cache", "--dataset", str(dataset), "--k", "1",
                "--out", str(cache_dir)] + FAST
        assert main(argv) == EXIT_OK
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"d_enc": 5}))  # cache was built at 16
        out = tmp_path / "out"
        base = ["train", "--dataset", str(dataset), "--k", "1", "--task", "flp",
                "--out", str(out), "--provider", f"file:{cache_dir}",
                "--config", str(cfg_path)] + FAST
        assert main(base) == EXIT_CONFIG

    def test_incomplete_cache_fails_during_training(self, dataset, tmp_path):
        cache_dir = tmp_path / "cache"
        argv = ["embed-cache", "--dataset", str(dataset), "--k", "1",
                "--out", str(cache_dir)] + FAST
        assert main(argv) == EXIT_OK
        dim, mapping = load_embeddings(cache_dir / LINK_PROMPTS_EMB)
        mapping.pop(sorted(mapping)[-1])
        EmbeddingCache(dim, mapping).save(cache_dir / LINK_PROMPTS_EMB)
        out = tmp_path / "out"
        base = ["train", "--dataset", str(dataset), "--k", "1", "--task", "flp",
                "--out", str(out), "--provider", f"file:{cache_dir}"] + FAST
        assert main(base) == EXIT_CACHE

    def test_missing_dataset(self, tmp_path):
        argv = ["train", "--dataset", str(tmp_path / "absent"), "--task", "flp",
                "--out", str(tmp_path / "out")] + FAST
        assert main(argv) == EXIT_DATA


class TestAblate:
    def test_writes_sweep_json(self, dataset, tmp_path):
        out = tmp_path / "out"
        argv = ["ablate", "--dataset", str(dataset), "--k", "1", "--task", "flp",
                "--out", str(out), "--epochs", "1", "--seed", "1"]
        assert main(argv) == EXIT_OK
        result = json.loads((out / "ablation_toy_flp_s1.json").read_text())
        assert set(result["lambda_kd_sweep"]) == {
            "0.25", "0.5", "0.75", "1", "1.25", "1.5", "1.75", "2",
        }
        assert result["kd_disabled"]["final_train_loss"] == (
            result["lambda_kd_zero"]["final_train_loss"]
        )
