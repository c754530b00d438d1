from __future__ import annotations

import pytest
from hypothesis import settings

from pe_builder import BuiltPe, SectionPlan, build_pe

settings.register_profile("ci", deadline=None)
settings.load_profile("ci")


@pytest.fixture
def spec_pe() -> BuiltPe:
    """1 section, FileAlignment 512, exactly 0x88 bytes of header slack."""
    return build_pe(num_sections=1, file_alignment=512, header_slack=0x88)


@pytest.fixture
def corpus() -> list[BuiltPe]:
    """Varied well-formed fixtures: 1-8 sections, all supported alignments."""
    out = []
    seed = 0
    for alignment in (512, 1024, 4096):
        for n in range(1, 9):
            seed += 1
            out.append(build_pe(num_sections=n, file_alignment=alignment, content_seed=seed))
            out.append(
                build_pe(
                    num_sections=n,
                    file_alignment=alignment,
                    header_slack=(37 * seed) % (2 * alignment),
                    sections=[SectionPlan(raw_size=alignment * (1 + (seed + i) % 3)) for i in range(n)],
                    content_seed=seed + 1000,
                )
            )
    return out
