"""Exact counting of free-space vertices for a convex robot translating among
convex obstacles in 3-space, by brute force and by parametric-plane envelopes."""
from .constructions import (
    GenConfig, GenerationFailed, fig1_crossings, fig1_pairings, fig1_scene, hard_envelope_family,
    quadratic_predicted, quadratic_scene, random_scene, random_segments,
)
from .contacts import (
    ContactSpec, TripleContact, Unclassifiable, brute_force_triples, classify_triple,
    contact_model, contact_surface, is_free, solve_triple, third_contacts_on_line,
)
from .envelopes import (
    Envelope, cross_envelope_visible, envelope, inverse_ackermann, naive_cross_visible,
    naive_envelope,
)
from .planes import cover, explain, pp_segment_generic, structured_triples, vertex_families
from .scene import (
    Obstacle, RobotShape, Scene, check_general_position, load_scene, make_obstacle, make_robot,
    make_scene, perturb_scene, save_scene, validate_scene,
)

__version__ = "0.1.0"
