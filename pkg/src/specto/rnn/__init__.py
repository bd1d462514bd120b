from .cells import (
    CellParams,
    GATE_ORDER,
    KINDS,
    TASKS,
    accuracy,
    backward,
    batch_loss_and_grads,
    extract_recurrent_matrices,
    forward,
    forward_batch,
    init_cell,
    loss,
    param_items,
    predictions,
    rnn_jacobian_product_norms,
    softmax,
)
from .datasets import (
    Dataset,
    adding_splits,
    generate_adding,
    load_dataset,
    load_mnist_idx,
    save_dataset,
    synthetic_digits,
    write_idx_images,
    write_idx_labels,
)
from .training import EpochRecord, TrainConfig, train

__all__ = [
    "CellParams",
    "GATE_ORDER",
    "KINDS",
    "TASKS",
    "Dataset",
    "EpochRecord",
    "TrainConfig",
    "accuracy",
    "adding_splits",
    "backward",
    "batch_loss_and_grads",
    "extract_recurrent_matrices",
    "forward",
    "forward_batch",
    "generate_adding",
    "init_cell",
    "load_dataset",
    "load_mnist_idx",
    "loss",
    "param_items",
    "predictions",
    "rnn_jacobian_product_norms",
    "save_dataset",
    "softmax",
    "synthetic_digits",
    "train",
    "write_idx_images",
    "write_idx_labels",
]
