# Copyright 2026 The printproof Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Forensic analysis of still images: metadata, ELA, PCA, LGA, noise maps,
single-view metrology and audited reports."""

from printproof._core import (
    AnalysisMap,
    PrintproofError,
    content_hash,
    ela,
    lga,
    metadata,
    metadata_listing,
    metrology,
    noise,
    pca,
    report,
    verify,
)

__all__ = [
    "AnalysisMap",
    "PrintproofError",
    "content_hash",
    "ela",
    "lga",
    "metadata",
    "metadata_listing",
    "metrology",
    "noise",
    "pca",
    "report",
    "verify",
]
