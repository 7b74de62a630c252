from .baseline import KnowledgeResources, ReaderConfig, predict_dataset, predict_span
