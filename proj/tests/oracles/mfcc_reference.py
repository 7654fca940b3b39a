#!/usr/bin/env python3
# tests/oracles/mfcc_reference.py

# Copyright 2026  The uti-detect Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
# KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
# WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
# MERCHANTABLITY OR NON-INFRINGEMENT.
# See the Apache 2 License for the specific language governing permissions and
# limitations under the License.

"""Reference static MFCCs for the first frame of a 1 kHz unit sine.

Stand-alone numpy/scipy implementation with the toolkit's documented
configuration: 16 kHz, 25 ms Hamming window, pre-emphasis 0.97 (first sample
scaled by 0.03), 512-point power spectrum, 26 triangular mel filters over
0-8 kHz on the natural-log mel scale, log floor 1e-10, orthonormal DCT-II,
20 coefficients. Prints one value per line with 10 significant digits.
"""
import numpy as np
from scipy.fft import dct

RATE = 16000
WIN = 400
NFFT = 512
NMEL = 26
NCEPS = 20


def mel(hz):
    return 1127.0 * np.log1p(hz / 700.0)


def filterbank():
    bins = NFFT // 2 + 1
    edges = np.linspace(mel(0.0), mel(RATE / 2), NMEL + 2)
    bin_mel = mel(np.arange(bins) * RATE / NFFT)
    bank = np.zeros((NMEL, bins))
    for m in range(NMEL):
        lo, c, hi = edges[m], edges[m + 1], edges[m + 2]
        rising = (bin_mel > lo) & (bin_mel <= c)
        falling = (bin_mel > c) & (bin_mel < hi)
        bank[m, rising] = (bin_mel[rising] - lo) / (c - lo)
        bank[m, falling] = (hi - bin_mel[falling]) / (hi - c)
    return bank


def main():
    t = np.arange(WIN) / RATE
    x = np.sin(2 * np.pi * 1000.0 * t)
    y = np.empty_like(x)
    y[1:] = x[1:] - 0.97 * x[:-1]
    y[0] = x[0] - 0.97 * x[0]
    y *= np.hamming(WIN)
    power = np.abs(np.fft.rfft(y, NFFT)) ** 2
    logmel = np.log(np.maximum(filterbank() @ power, 1e-10))
    ceps = dct(logmel, type=2, norm="ortho")[:NCEPS]
    for v in ceps:
        print(f"{v:.10g}")


if __name__ == "__main__":
    main()
