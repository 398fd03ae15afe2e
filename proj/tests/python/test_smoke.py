# SPDX-License-Identifier: Apache-2.0
#
# Copyright 2026 The rfrecon Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import os
import subprocess

import numpy as np
import pytest

import rfrecon


def test_generate_is_deterministic():
    a = rfrecon.generate_scene(3)
    b = rfrecon.generate_scene(3)
    assert a == b
    assert len(a.ues) == 30 and len(a.bss) == 5
    assert rfrecon.Scene.from_json(a.to_json()) == a


def test_mirror_scene_trace():
    scene = rfrecon.make_scene(
        200.0, [[(0.0, 3.0), (20.0, 3.0), (20.0, 4.0), (0.0, 4.0)]], [(8.0, 0.0)], [(12.0, 0.0)]
    )
    (link,) = rfrecon.trace(scene)
    lengths = sorted(p.length_m for p in link.paths)
    assert lengths[0] == pytest.approx(4.0)
    assert lengths[1] == pytest.approx(2 * 13 ** 0.5)


def test_device_inside_building_is_a_value_error():
    with pytest.raises(ValueError):
        rfrecon.make_scene(200.0, [[(0, 0), (10, 0), (10, 10), (0, 10)]], [(5.0, 5.0)], [(50.0, 50.0)])


def test_encode_reconstruct_score():
    scene = rfrecon.generate_scene(5, align_px=64)
    links = rfrecon.trace(scene)
    tensor, labels = rfrecon.encode(scene, links, grid_px=64)
    assert tensor.shape == (60, 64, 64)
    assert tensor.dtype == np.float32
    assert labels[:2] == ["ue0/aoa", "ue0/aod"]
    assert 0.0 <= tensor.min() and tensor.max() <= 1.0

    gt = rfrecon.rasterize(scene, 64)
    pred, prob, n_evidence = rfrecon.reconstruct(scene, links, grid_px=64)
    assert pred.shape == gt.shape == prob.shape
    assert np.array_equal(pred, prob >= 0.5)
    assert n_evidence > 0

    same = rfrecon.score(gt, gt, 200.0 / 64)
    assert same["iou"] == 1.0 and same["hausdorff_m"] == 0.0
    s = rfrecon.score(gt, pred, 200.0 / 64)
    assert 0.0 <= s["iou"] <= min(s["precision"], s["recall"])
    with pytest.raises(ValueError):
        rfrecon.score(gt, gt[:32], 1.0)

    features = rfrecon.link_features(scene, links[0])
    assert len(features) == 35


def test_file_formats(tmp_path):
    scene = rfrecon.generate_scene(8, align_px=32)
    tensor, labels = rfrecon.encode(scene, rfrecon.trace(scene), grid_px=32)
    path = tmp_path / "t.rft"
    rfrecon.write_tensor(path, tensor, labels, scene.side_m)
    back, back_labels, side = rfrecon.read_tensor(path)
    assert np.array_equal(back, tensor) and back_labels == labels and side == 200.0
    raw = path.read_bytes()
    assert raw[:4] == b"RFT1"
    assert len(raw) == 16 + tensor.size * 4

    gt = rfrecon.rasterize(scene, 32)
    rfrecon.write_pbm(tmp_path / "m.pbm", gt)
    assert np.array_equal(rfrecon.read_pbm(tmp_path / "m.pbm"), gt)
    with pytest.raises(OSError):
        rfrecon.read_pbm(tmp_path / "missing.pbm")


def test_run_cli_pipeline(tmp_path):
    out = str(tmp_path / "ds")
    code, stdout, _ = rfrecon.run_cli(
        ["pipeline", "--seed", "1", "--scenes", "4", "--grid-px", "32", "--ues", "6", "--bss", "2", "--out", out]
    )
    assert code == 0
    report = json.loads(stdout.strip().splitlines()[-1])
    assert report["maps"] == 4
    manifest = json.loads((tmp_path / "ds" / "manifest.json").read_text())
    assert manifest["tensor_channels"] == 12
    assert rfrecon.run_cli(["generate", "--bogus"])[0] == 1


def test_trainer_style_predictions_are_scored(tmp_path):
    """A directory of externally written .pred.pbm files is consumed by evaluate."""
    out = tmp_path / "ds"
    code, _, _ = rfrecon.run_cli(
        ["generate", "--seed", "2", "--scenes", "3", "--grid-px", "32", "--ues", "4", "--bss", "2", "--out", str(out)]
    )
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    pred_dir = tmp_path / "pred"
    for entry in manifest["scenes"]:
        arr, labels, side = rfrecon.read_tensor(out / "tensors" / (entry["id"] + ".rft"))
        assert arr.shape[0] == manifest["tensor_channels"]
        gt = rfrecon.read_pbm(out / "gt" / (entry["id"] + ".pbm"))
        rfrecon.write_pbm(pred_dir / (entry["id"] + ".pred.pbm"), gt)
    code, stdout, _ = rfrecon.run_cli(["evaluate", "--out", str(out), "--pred-dir", str(pred_dir)])
    assert code == 0
    report = json.loads(stdout.strip().splitlines()[-1])
    assert report["mean"]["iou"] == 1.0


@pytest.mark.skipif("RFRECON_CLI" not in os.environ, reason="command-line binary not provided")
def test_cli_binary_exit_codes(tmp_path):
    exe = os.environ["RFRECON_CLI"]
    assert subprocess.run([exe, "--help"], capture_output=True).returncode == 0
    assert subprocess.run([exe, "generate", "--out", str(tmp_path)], capture_output=True).returncode == 1
    missing = subprocess.run([exe, "trace", "--out", str(tmp_path / "none")], capture_output=True)
    assert missing.returncode == 2
