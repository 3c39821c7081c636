import math

import pytest
import torch

from pointmodel.data import Query
from pointmodel.model import (
    MissingSpecialToken,
    ModelConfig,
    PointRelationModel,
    Tokenizer,
    VocabularyMismatch,
)

POINT_TEXT = (
    "Document creation time: <dct> John <xs> arrived </xs> in Boston "
    "after <ye> midnight </ye> yesterday"
)


@pytest.fixture()
def model():
    torch.manual_seed(0)
    return PointRelationModel(ModelConfig(hidden_size=16))


class TestTokenizer:
    def test_special_tokens_have_dedicated_ids(self):
        tok = Tokenizer(ModelConfig())
        ids = tok.encode(POINT_TEXT)
        assert tok.special_ids["<xs>"] in ids
        assert tok.special_ids["<dct>"] in ids

    def test_word_buckets_deterministic(self):
        tok = Tokenizer(ModelConfig())
        assert tok.encode("arrived arrived") == tok.encode("arrived arrived")
        assert tok.encode("arrived")[0] >= tok.word_base

    def test_foreign_tags_rejected(self):
        tok = Tokenizer(ModelConfig(level="point"))
        with pytest.raises(VocabularyMismatch):
            tok.encode("an interval query <x> word </x> here <y> other </y>")


class TestEmbedAndPool:
    def test_feature_dimension_is_5m(self, model):
        features = model.embed_and_pool(model.tokenizer.encode(POINT_TEXT))
        assert features.shape == (5 * 16,)
        assert model.feature_dim == 80

    def test_missing_marker_rejected(self, model):
        with pytest.raises(MissingSpecialToken):
            model.embed_and_pool(model.tokenizer.encode("no tags at all here"))
        truncated = POINT_TEXT.replace(" </ye>", "")
        with pytest.raises(MissingSpecialToken):
            model.embed_and_pool(model.tokenizer.encode(truncated))

    def test_mean_of_identical_embeddings(self):
        # With the recurrent layer bypassed (identity on constant input is not
        # guaranteed), check the pooling arithmetic directly on embeddings.
        torch.manual_seed(1)
        model = PointRelationModel(ModelConfig(hidden_size=8))
        ids = model.tokenizer.encode("<xs> same </xs> same <ys> same </ys>")
        with torch.no_grad():
            value = torch.randn(8)
            for token_id in set(ids):
                model.embedding.weight[token_id] = value
            embedded = model.embedding(torch.tensor([ids]))
        assert torch.allclose(embedded[0].mean(dim=0), value, atol=1e-6)

    def test_marker_features_in_document_order(self, model):
        ids = model.tokenizer.encode(POINT_TEXT)
        features = model.embed_and_pool(ids)
        contextual, _ = model.context(model.embedding(torch.tensor([ids])))
        positions = [i for i, t in enumerate(ids)
                     if t in {model.tokenizer.special_ids[tag]
                              for tag in model.config.boundary_tokens}]
        m = model.config.hidden_size
        for k, pos in enumerate(positions):
            assert torch.allclose(features[k * m:(k + 1) * m], contextual[0, pos], atol=1e-6)


class TestHead:
    def test_zero_weights_give_uniform(self, model):
        with torch.no_grad():
            for layer in model.head:
                if hasattr(layer, "weight"):
                    layer.weight.zero_()
                    layer.bias.zero_()
        probs = model.head_forward(torch.randn(7, model.feature_dim))
        assert torch.allclose(probs, torch.full((7, 3), 1 / 3), atol=1e-6)

    def test_simplex_property(self, model):
        probs = model.head_forward(torch.randn(50, model.feature_dim))
        assert torch.all(probs >= 0)
        assert torch.allclose(probs.sum(dim=-1), torch.ones(50), atol=1e-6)

    def test_hand_computed_softmax(self):
        # One-dimensional toy: softmax of hand-set logits [1, 0, -1].
        logits = torch.tensor([1.0, 0.0, -1.0])
        expected = [math.exp(v) for v in (1.0, 0.0, -1.0)]
        total = sum(expected)
        probs = torch.softmax(logits, dim=-1)
        for p, e in zip(probs.tolist(), expected):
            assert p == pytest.approx(e / total, abs=1e-6)

    def test_interval_head_has_11_outputs(self):
        model = PointRelationModel(ModelConfig(level="interval", hidden_size=8))
        probs = model.head_forward(torch.randn(3, model.feature_dim))
        assert probs.shape == (3, 11)


def test_finite_difference_gradient():
    """Head gradients w.r.t. its inputs match numeric differentiation."""
    torch.manual_seed(3)
    model = PointRelationModel(ModelConfig(hidden_size=4)).double()
    features = torch.randn(model.feature_dim, dtype=torch.double, requires_grad=True)
    target = torch.tensor(1)

    def loss_of(x):
        return torch.nn.functional.cross_entropy(model.head(x).unsqueeze(0),
                                                 target.unsqueeze(0))

    loss = loss_of(features)
    loss.backward()
    analytic = features.grad.clone()
    eps = 1e-6
    for i in range(model.feature_dim):
        bumped = features.detach().clone()
        bumped[i] += eps
        dipped = features.detach().clone()
        dipped[i] -= eps
        with torch.no_grad():
            numeric = (loss_of(bumped) - loss_of(dipped)) / (2 * eps)
        denom = max(abs(float(numeric)), abs(float(analytic[i])), 1e-8)
        assert abs(float(numeric) - float(analytic[i])) / denom < 1e-4


class TestPredictQueries:
    def test_point_records_sum_to_one(self, model):
        queries = [Query("d|e1.s|e2.e|forward", "d", "forward", POINT_TEXT)]
        records = model.predict_queries(queries)
        assert set(records[0]) == {"query_id", "p_before", "p_equal", "p_after"}
        total = records[0]["p_before"] + records[0]["p_equal"] + records[0]["p_after"]
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_untrained_model_near_uniform(self, model):
        queries = [Query("d|e1.s|e2.e|forward", "d", "forward", POINT_TEXT)]
        rec = model.predict_queries(queries)[0]
        for key in ("p_before", "p_equal", "p_after"):
            assert abs(rec[key] - 1 / 3) <= 0.1

    def test_interval_records_carry_scores(self):
        torch.manual_seed(0)
        model = PointRelationModel(ModelConfig(level="interval", hidden_size=8))
        text = ("Document creation time: <dct> The <x> storm </x> hit before "
                "the <y> cleanup </y> began")
        records = model.predict_queries([Query("d|e1|e2|interval", "d", "forward", text)])
        rec = records[0]
        assert rec["doc_id"] == "d" and rec["source"] == "e1" and rec["target"] == "e2"
        assert rec["predicted_relation"] in rec["scores"]
        assert sum(rec["scores"].values()) == pytest.approx(1.0, abs=1e-6)

    def test_checkpoint_round_trip(self, model, tmp_path):
        path = tmp_path / "model.pt"
        model.save(path)
        loaded = PointRelationModel.load(path)
        queries = [Query("d|e1.s|e2.e|forward", "d", "forward", POINT_TEXT)]
        assert loaded.predict_queries(queries) == model.predict_queries(queries)
