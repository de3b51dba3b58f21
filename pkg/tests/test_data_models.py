"""
Suite of tests for data models for incoming parameters and outgoing answers.
"""

# General imports
import json

import pytest
from pydantic import ValidationError
# Module imports
from pyrangeclust import models
from pyrangeclust.utils.exceptions import QuerySpecError


def test_build_params():
    """
    Test defaults and validators from BuildParams Model.
    """
    params = models.BuildParams()
    assert params.delta == 0.5
    assert params.k_max == 16
    assert params.seed == 0x5EED
    assert params.c1 == 25.0

    wider = models.BuildParams(swap_width=2)
    assert wider.c1 == 20.0

    with pytest.raises(ValidationError):
        models.BuildParams(delta=1.0)  # Should fail as delta must be below 1.
    with pytest.raises(ValidationError):
        models.BuildParams(k_max=12)  # Not a power of two.
    with pytest.raises(ValidationError):
        models.BuildParams(c1=1.0)
    with pytest.raises(ValidationError):
        models.BuildParams(unknown=3)


def test_query_spec():
    """
    Test validators from QuerySpec Model.
    """
    spec = models.QuerySpec(type="kmedian", lo=[0, 0], hi=[1, 2], k=3, eps=0.2)
    assert spec.type == models.QueryType.kmedian
    assert spec.type.is_clustering
    assert spec.hi == [1.0, 2.0]

    extent = models.QuerySpec(type="diameter", lo=[0, 0], hi=[1, 1], eps=0.1)
    assert extent.k is None
    assert not extent.type.is_clustering

    with pytest.raises(ValidationError):
        models.QuerySpec(type="kmeans", lo=[0, 0], hi=[1, 1], eps=0.1)  # k missing.
    with pytest.raises(ValidationError):
        models.QuerySpec(type="kcenter", lo=[0, 0], hi=[1, 1], k=0, eps=0.1)
    with pytest.raises(ValidationError):
        models.QuerySpec(type="radius", lo=[2, 0], hi=[1, 1], eps=0.1)
    with pytest.raises(ValidationError):
        models.QuerySpec(type="radius", lo=[0, 0, 0], hi=[1, 1], eps=0.1)
    with pytest.raises(ValidationError):
        models.QuerySpec(type="radius", lo=[0, 0], hi=[1, 1], eps=0.0)
    with pytest.raises(ValidationError):
        models.QuerySpec(type="median", lo=[0, 0], hi=[1, 1], k=1, eps=0.1)


def test_parse_range():
    """
    Test the console range syntax.
    """
    lo, hi = models.parse_range("0.1,-2x0.5,3")
    assert lo == [0.1, -2.0]
    assert hi == [0.5, 3.0]

    spec = models.QuerySpec.from_range("kcenter", "0,0x1,1", eps=0.25, k=2)
    assert spec.lo == [0.0, 0.0] and spec.k == 2

    with pytest.raises(QuerySpecError):
        models.parse_range("0,0,1,1")
    with pytest.raises(QuerySpecError):
        models.parse_range("0,ax1,1")


def test_gen_spec():
    """
    Test validators from GenSpec Model.
    """
    spec = models.GenSpec(n=10, d=3, mixture="gaussians")
    assert spec.mixture == models.Mixture.gaussians
    with pytest.raises(ValidationError):
        models.GenSpec(n=10, d=9)
    with pytest.raises(ValidationError):
        models.GenSpec(n=0, d=2)
    with pytest.raises(ValidationError):
        models.GenSpec(n=10, d=2, sigma=0)


def test_answer_json():
    """
    Test the serialized form of an answer.
    """
    answer = models.ClusteringAnswer(type="kmedian", k=2, eps=0.2,
                                     centers=[[0.0, 1.0]], cost=1.5,
                                     solver="exhaustive")
    payload = json.loads(answer.to_json())
    assert payload["schema"] == 1
    assert payload["centers"] == [[0.0, 1.0]]
    assert "coreset" not in payload
    assert "warning" not in payload
    assert list(payload) == sorted(payload)

    flagged = models.ClusteringAnswer(type="radius", eps=0.1, warning="empty range")
    assert json.loads(flagged.to_json())["warning"] == "empty range"


def test_validation_report():
    """
    Test report aggregation and its CSV rendering.
    """
    good = models.PropertyResult(suite="structures", name="range_count", passed=True,
                                 checks=4)
    bad = models.PropertyResult(suite="extent", name="diameter_sandwich", passed=False,
                                checks=4, violations=1, worst_slack=-0.5,
                                detail='ratio "1.2"')
    report = models.ValidationReport(n=10, d=2, suites=["structures"], results=[good])
    assert report.passed
    report.results.append(bad)
    assert not report.passed

    lines = report.to_csv().splitlines()
    assert lines[0] == "suite,name,passed,checks,violations,worst_slack,detail"
    assert lines[1].startswith("structures,range_count,1,4,0,")
    assert lines[2].endswith("\"ratio '1.2'\"")
    assert json.loads(report.to_json())["schema"] == 1
