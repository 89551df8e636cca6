# Copyright 2026 The GAMT Authors. All Rights Reserved.
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

"""Guided-attention neural machine translation toolkit."""

from ._gamt import (
    Error,
    FormatError,
    Model,
    UsageError,
    accuracy,
    align,
    bleu,
    evaluate,
    guided_penalty,
    make_synthetic,
    per,
    preprocess,
    ter,
    train,
    wer,
)

__all__ = [
    "Error",
    "FormatError",
    "Model",
    "UsageError",
    "accuracy",
    "align",
    "bleu",
    "evaluate",
    "guided_penalty",
    "make_synthetic",
    "per",
    "preprocess",
    "ter",
    "train",
    "wer",
]
