"""Function-space pooling for graph classification, implemented in numpy."""

from .conv import ConvLayer, conv_backward, conv_forward
from .data import (
    Dataset,
    LabeledGraph,
    adjacency,
    kfold_split,
    make_graph,
    one_hot_features,
    parse_tu_dataset,
    write_tu_dataset,
)
from .errors import FormatError, IngestionError, ShapeError, StateError, TrainingDivergedError
from .evaluate import CVReport, accuracy, cross_validate
from .model import (
    DenseLayer,
    Model,
    ModelConfig,
    PredictionResult,
    load_checkpoint,
    loss,
    model_backward,
    model_forward,
    save_checkpoint,
)
from .optim import AdamState, TrainConfig, adam_step, init_model, train, write_history_csv
from .pooling import (
    FunctionPooling,
    MeanPooling,
    SumPooling,
    gaussian_eval,
    lp_distance,
    pool_backward,
    pool_forward,
    pool_mean,
    pool_sum,
    sigmoid_map,
)

__version__ = "0.1.0"
