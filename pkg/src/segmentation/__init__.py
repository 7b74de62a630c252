from .sections import (
    Section,
    answer_section_index,
    detect_headers,
    load_header_lexicon,
    segment_note,
    shorten_context,
    shorten_dataset,
)
