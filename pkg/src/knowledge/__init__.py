from .transe import (
    EmbeddingTable,
    TransEConfig,
    evaluate_link_prediction,
    margin_loss_and_grad,
    train_transe,
    transe_score,
)
from .kim import (
    KimParams,
    align_entities_to_tokens,
    init_kim_params,
    kim_fuse,
    load_kim_params,
    save_kim_params,
)
from .vectors import WordVectors
from .io import load_embedding_table, load_loss_trace, save_embedding_table, save_loss_trace
