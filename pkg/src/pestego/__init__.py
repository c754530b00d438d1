"""pestego: hide files in 32-bit PE header slack; statistical bit embedding for raster carriers."""

from .errors import (
    BlockTooSmallError,
    CarrierTooSmallError,
    CorruptPayloadError,
    InsufficientSlackError,
    LengthMismatchError,
    NameTooLongError,
    NoPayloadError,
    Not32BitError,
    NotMzError,
    NotPeError,
    OddBlockLengthError,
    PeFormatError,
    PeStegoError,
    SlackOccupiedError,
    StrictParseError,
    TruncatedError,
    UnmappedRvaError,
    UnsafeNameError,
)
from .integrity import EquivalenceReport, compare, validate_pe
from .payload import CapacityReport, PayloadRecord, capacity, hide, retract, write_extracted_file
from .pe_format import (
    DosHeader,
    NtHeaders,
    PeImage,
    Region,
    SectionHeader,
    file_offset_to_rva,
    header_slack,
    parse_pe,
    rva_to_file_offset,
    rva_to_va,
    section_slack,
    serialize,
)
from .statstego import (
    Carrier,
    CarrierBlock,
    DetectionStatistic,
    KeyPattern,
    MessageLayout,
    StatParams,
    block_capacity,
    block_statistics,
    derive_pattern,
    detect_bit,
    embed_bit,
    embed_message,
    extract_message,
    normal_quantile,
    split_block,
    statistic,
)

__version__ = "0.1.0"

__all__ = [
    "BlockTooSmallError",
    "CapacityReport",
    "Carrier",
    "CarrierBlock",
    "CarrierTooSmallError",
    "CorruptPayloadError",
    "DetectionStatistic",
    "DosHeader",
    "EquivalenceReport",
    "InsufficientSlackError",
    "KeyPattern",
    "LengthMismatchError",
    "MessageLayout",
    "NameTooLongError",
    "NoPayloadError",
    "Not32BitError",
    "NotMzError",
    "NotPeError",
    "NtHeaders",
    "OddBlockLengthError",
    "PayloadRecord",
    "PeFormatError",
    "PeImage",
    "PeStegoError",
    "Region",
    "SectionHeader",
    "SlackOccupiedError",
    "StatParams",
    "StrictParseError",
    "TruncatedError",
    "UnmappedRvaError",
    "UnsafeNameError",
    "block_capacity",
    "block_statistics",
    "capacity",
    "compare",
    "derive_pattern",
    "detect_bit",
    "embed_bit",
    "embed_message",
    "extract_message",
    "file_offset_to_rva",
    "header_slack",
    "hide",
    "normal_quantile",
    "parse_pe",
    "retract",
    "rva_to_file_offset",
    "rva_to_va",
    "section_slack",
    "serialize",
    "split_block",
    "statistic",
    "validate_pe",
    "write_extracted_file",
]
