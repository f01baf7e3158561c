import logging
import math

from app.application.commands.fit_commands import EvaluateCommand, FitCommand
from app.domain.errors import DomainError, ResourceLimitError
from app.domain.estimators.distances import distance
from app.domain.estimators.pmfs import empirical, k_tilde
from app.domain.families.kernels import lemma_monotone_check, ratio_bound_check, theory_constants
from app.domain.mixtures.model import (
    log_likelihood,
    tail_bound_check,
    tail_index_Kn,
    tau_n,
    zero_cell_bound,
    zero_probability_row,
)
from app.domain.npmle.solver import certify, fit
from app.infrastructure.io.datasets import read_dataset
from app.infrastructure.serialization import EvaluationDocument, FitDocument, read_mixture, write_document

logger = logging.getLogger(__name__)


class FitHandler:
    def fit(self, command: FitCommand) -> FitDocument:
        dataset = read_dataset(command.input_path)
        result = fit(dataset, command.family, command.options)
        document = FitDocument.from_result(result)
        if command.output_path:
            write_document(document, command.output_path)
        return document

    def evaluate(self, command: EvaluateCommand) -> EvaluationDocument:
        model = read_mixture(command.model_path)
        report = {"d": model.d}

        if command.data_path:
            dataset = read_dataset(command.data_path)
            if dataset.d != model.d:
                raise DomainError(f"data has {dataset.d} columns, model has dimension {model.d}")
            n = dataset.n
            report["n"] = n
            report["loglik"] = log_likelihood(model, dataset)
            if math.isinf(report["loglik"]):
                report["zero_probability_row"] = zero_probability_row(model, dataset)
            else:
                report["certificate"] = certify(model, dataset, command.certify_points, command.certify_seed)
            observed = empirical(dataset)
            report["distances_to_data"] = [distance(model, observed, m, command.eps_tail) for m in command.metrics]
            if n * model.d >= 3:
                try:
                    report["k_tilde"] = k_tilde(model, n, model.d)
                    report["tail_index_Kn"] = tail_index_Kn(model, n)
                except ResourceLimitError as error:
                    logger.warning("tail indices not computed: %s", error)

        if command.reference_path:
            reference = read_mixture(command.reference_path)
            report["distances_to_reference"] = [
                distance(model, reference, m, command.eps_tail) for m in command.metrics
            ]

        constants = None
        if command.support_bound is not None:
            if command.delta0 is None or command.eta0 is None:
                raise DomainError("theory constants need support bound, delta0 and eta0 together")
            constants = theory_constants(model.family, command.support_bound, command.delta0, command.eta0, model.d)
            report["constants"] = constants
            report["monotone_check"] = lemma_monotone_check(model.family, constants)
            report["ratio_check"] = ratio_bound_check(model.family, constants)
            try:
                report["tail_bound"] = tail_bound_check(model, constants, max(constants.U, constants.W))
            except DomainError as error:
                logger.warning("tail bound not checked: %s", error)

        if "tail_index_Kn" in report:
            Kn = report["tail_index_Kn"]
            try:
                report["tau_n"] = tau_n(model, Kn, constants)
            except ResourceLimitError as error:
                logger.warning("tau_n not computed: %s", error)
            report["zero_cell_bound"] = zero_cell_bound(model, Kn, report["n"])

        document = EvaluationDocument(**report)
        if command.output_path:
            write_document(document, command.output_path)
        return document
