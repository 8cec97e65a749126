"""Canonical entity kinds and predicate names for the education schema.

Kinds are open string tags; the constants below are the built-in education
vocabulary plus the analytics tags. Arbitrary lowercase tags (poem-domain
entities such as ``author`` or ``emotion``) are equally valid.

Predicate strings are fixed here because analytics and recommendation
traverse them by name.
"""

from __future__ import annotations

# Built-in entity kinds.
KIND_SCHOOL = "school"
KIND_COURSE = "course"
KIND_CHAPTER = "chapter"
KIND_KNOWLEDGE = "knowledge"
KIND_RESOURCE = "resource"
KIND_SUBJECT = "subject"
KIND_EXERCISE = "exercise"
KIND_TEACHER = "teacher"
KIND_STUDENT = "student"
KIND_CREATOR = "creator"
KIND_CATEGORY = "category"
KIND_KNOWLEDGE_POINT = "knowledgepoint"

BUILTIN_KINDS = frozenset({
    KIND_SCHOOL, KIND_COURSE, KIND_CHAPTER, KIND_KNOWLEDGE, KIND_RESOURCE,
    KIND_SUBJECT, KIND_EXERCISE, KIND_TEACHER, KIND_STUDENT, KIND_CREATOR,
    KIND_CATEGORY, KIND_KNOWLEDGE_POINT,
})

# Canonical predicates.
PRED_OFFERS = "offers"                 # teacher -> course
PRED_LEARNED = "learned"               # student -> course
PRED_COURSE_SUBJECT = "course-subject" # course -> subject
PRED_HAS_CATEGORY = "has_category"     # course -> category
PRED_COVERS = "covers"                 # course -> knowledgepoint
PRED_RELATED_TO = "related_to"         # knowledgepoint -> knowledgepoint
PRED_PRACTICES = "practices"           # exercise -> knowledgepoint
PRED_RESOURCE_OF = "resource_of"       # exercise/resource -> course
PRED_PREREQUISITE = "prerequisite"     # course -> course

# Resource-type buckets used by completion accounting. Exercise nodes have
# their own kind; all other resources are ``resource`` nodes whose ``type``
# attribute selects video/note, defaulting to other.
RESOURCE_TYPES = ("exercise", "video", "note", "other")


def resource_type(kind: str, attrs: dict[str, str]) -> str:
    if kind == KIND_EXERCISE:
        return "exercise"
    t = attrs.get("type", "other")
    return t if t in ("video", "note") else "other"
