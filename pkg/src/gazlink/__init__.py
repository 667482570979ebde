"""Gazetteer-driven ("push") entity linking.

Offline, a knowledge base is compiled into a gazetteer expanded with
harvested synonyms plus prior scores; at runtime, label matches in text
are linked to the best-scoring candidate concept.
"""

from .annotator import Annotation, Annotator, Document, RankingPolicy, annotate
from .kb import Concept, KnowledgeBase, TypeFilter, apply_type_filter, load_kb
from .lexicon import CompiledResources, build_lexicon, compile_resources, expand_with_synonyms, load_resources
from .priors import PriorStore, corpus_priors, filter_cooc, pagerank

__version__ = "0.1.0"
