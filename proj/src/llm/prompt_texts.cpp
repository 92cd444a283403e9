// Copyright 2026 The Clarify Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Built-in prompt templates. The French set is the one sent to models; the
// English set mirrors it.

#include "clarify/llm/prompt_texts.hpp"

namespace clarify::llm {
namespace {

namespace ph = placeholder;

const char* kAuExtractionFr =
    R"(Je vais te donner un texte d'opinion en français. Ta tâche est de segmenter ce texte en unités argumentatives. On définit une unité argumentative comme un ou plusieurs segments du texte qui portent sur un sujet particulier. Elle peut être composée de solutions, d'arguments ou de simples constats. Une unité argumentative n'est pas forcément contiguë : elle peut réunir des segments qui ne se suivent pas.

Cette tâche est EXTRACTIVE. Tu dois RECOPIER et seulement recopier le texte de l'unité argumentative exactement comme il est écrit, majuscules et ponctuation comprises. Si l'unité argumentative est composée de plusieurs segments non contigus, tu peux les concaténer en les séparant simplement par un espace. Il y a au moins une unité argumentative dans le texte, mais pas de nombre maximum. Fais ressortir les unités argumentatives sous forme de liste comme dans l'exemple. Tous les segments du texte ne font pas forcément partie d'une unité argumentative.

Tu dois donner les unités argumentatives sous forme de liste :
- unité argumentative 1
- unité argumentative 2...

Ne renvoie RIEN D'AUTRE que la liste des unités argumentatives.)";

const char* kAuExtractionEn =
    R"(I am going to give you an opinion piece in French. Your task is to segment this text into argumentative units. We define an argumentative unit as one or more segments of the text that focus on a particular topic. It may consist of solutions, arguments, or simple statements. An argumentative unit is not necessarily contiguous: it can join segments that do not follow each other.

This task is EXTRACTIVE. You must COPY and only copy the text of the argumentative unit exactly as it is written, including capital letters and punctuation. If the argumentative unit is composed of several non-contiguous segments, you can concatenate them by simply separating them with a space. There is at least one argumentative unit in the text, but no maximum number. Highlight the argumentative units in the form of a list as shown in the example. Not all segments of the text are necessarily part of an argumentative unit.

You must give the argumentative units in the form of a list:
- argumentative unit 1
- argumentative unit 2...

Do NOT output ANYTHING OTHER than the list of argumentative units.)";

const char* kAsDetectionFr =
    R"(Je vais te donner un segment de texte contenant des opinions en français. Ta tâche est de segmenter ce texte et d'attribuer un type à chaque segment. Les types possibles sont CONSTAT, PRÉMISSE et SOLUTION, et UNIQUEMENT ceux-là. Voici la définition de chaque type :
- SOLUTION : une proposition d'action (concrète et réalisable ou non) à mener pour résoudre un problème.
- CONSTAT : l'expression d'une opinion sous forme d'assertion, qui n'apporte pas de solution mais exprime plutôt un ressenti.
- PRÉMISSE : une justification, un argument ou un exemple qui appuie une assertion ou une solution.

Cette tâche est EXTRACTIVE, tu dois recopier le texte de chaque segment exactement comme il est écrit, majuscules et ponctuation comprises. Tout le texte doit être segmenté. Tous les types de segments ne sont pas forcément présents, et plusieurs segments peuvent être du même type. Tu DOIS faire ressortir la segmentation en suivant exactement le format de l'exemple, y compris le « - » pour chaque segment.

- [CONSTAT] Constat 1
- [SOLUTION] Solution 1
- [CONSTAT] Constat 2
- [PRÉMISSE] Argument 1...

Je vais te donner le texte original et le segment, et tu dois renvoyer la liste des segments et de leurs types sous la forme « - [TYPE] SEGMENT », et rien d'autre.)";

const char* kAsDetectionEn =
    R"(I am going to give you a segment of text containing opinions in French. Your task is to segment this text and assign each segment a type. The possible types are STATEMENT, PREMISE, and SOLUTION, and ONLY those. Below is the definition of each type:
- SOLUTION: a proposal for action (whether concrete and feasible or not) to be taken to solve a problem.
- STATEMENT: the expression of an opinion as an assertion, which does not provide a solution but rather expresses a feeling.
- PREMISE: a justification, argument, or example that supports an assertion or solution.

This task is EXTRACTIVE; you must copy the text of each segment exactly as it is written, including capital letters and punctuation. The entire text must be segmented. Not all types of segments are necessarily present, and several segments may be of the same type. You MUST highlight the segmentation by following the exact format of the example, including the "-" for each segment.

- [STATEMENT] Statement 1
- [SOLUTION] Solution 1
- [STATEMENT] Statement 2
- [PREMISE] Argument 1...

I will give you the original text and the segment, and you must output the list of segments and their types in the form "- [TYPE] SEGMENT", and nothing else.)";

const char* kClarificationFr =
    R"(Je vais te donner un segment de texte d'opinion en français, ainsi que le texte original dont il est extrait. Ton travail est de réécrire clairement ce segment d'opinion. En particulier, tu dois d'abord corriger les fautes d'orthographe, de grammaire et de syntaxe. Tu dois aussi ajouter le contexte présent dans le texte original s'il est important pour comprendre le segment. Le texte clarifié final doit être compréhensible sans accès ni au texte original ni à son sous-segment. Si le segment est déjà clair et bien écrit, tu dois simplement le recopier. Tu dois UNIQUEMENT faire ressortir la clarification du segment et rien d'autre.)";

const char* kClarificationEn =
    R"(I will give you a segment of opinion text in French, as well as the original text from which it is taken. Your job is to rewrite this opinion segment clearly. In particular, you must first correct spelling, grammar, and syntax errors. You must also add the context present in the original text if it is important for understanding the segment. The final clarified text must be understandable without access to either the original text or its sub-segment. If the segment is already clear and well written, you should simply copy it. You should ONLY highlight the clarification of the segment and nothing else.)";

const char* kAnnotationFr =
    R"(Tu es un portail de clarification d'arguments. L'utilisateur va te donner une opinion écrite sur un thème donné, ainsi que la segmentation de l'un des arguments de cette opinion en trois types de segments : constat(s), argument(s) et solution(s). Extrais, en une phrase, l'argument clair et auto-suffisant sous-jacent à cette segmentation. Donne la priorité à la solution, et n'inclus les arguments et les constats que s'ils te semblent pertinents. Tu peux t'aider du contexte de l'opinion entière, mais n'inclus aucune information qui ne soit pas présente dans les segments. Réponds uniquement avec l'argument clair et auto-suffisant, et rien d'autre. Si l'argument est déjà clair et bien écrit, tu peux reprendre directement cet argument.)";

const char* kAnnotationEn =
    R"(You are an argument clarification portal. The user will give you a written opinion on a given topic, as well as the segmentation of one of the arguments in that opinion into three types of segments: statement(s), argument(s), and solution(s). Extract, in one sentence, the clear and self-sufficient argument underlying this segmentation. Prioritize the solution, and include arguments and statements only if they seem relevant to you. You can use the context of the entire opinion to help you, but do not include any information that is not present in the segments. Respond only with the clear and self-sufficient argument, and nothing else. If the argument is already clear and well written, you can refer directly to that argument.)";

const char* kClarifJudgeFr =
    R"(### Rôle
Tu es un expert en réécriture et en clarification. Ta tâche est de juger la clarté d'un texte donné.

### Consignes strictes
L'utilisateur va te donner un texte, un segment de ce texte (qui peut éventuellement être le texte entier) et deux clarifications de ce segment, A et B.
Une clarification doit transformer le texte initial en un texte clair et auto-suffisant, compréhensible sans le contexte du texte initial.
Cette clarification peut ajouter ce contexte s'il est contenu dans le texte initial et reformuler le segment. En revanche, elle ne doit pas ajouter de justifications si le texte n'en mentionne pas. Tu dois juger laquelle des deux clarifications est la meilleure.
Réponds UNIQUEMENT par « A », « B » ou « ÉGALITÉ ». Ne réponds « ÉGALITÉ » que s'il n'y a aucune différence entre les deux. Privilégie « A » ou « B ».

### Exemples de référence :
Exemple 1 (ajout d'une justification) :
Texte :
Je ne comprends pas comment on peut être aussi déconnecté de la réalité. IL FAUT BAISSER LE SALAIRE DU PRÉSIDENT !!
Segment :
IL FAUT BAISSER LE SALAIRE DU PRÉSIDENT !!
Clarifications :
A- Le salaire du président doit être baissé.
B- Le salaire du président doit être baissé pour limiter les dépenses publiques.
Réponse : A

Exemple 2 (l'une des deux ajoute un contexte important) :
Texte :
Les inégalités sont trop fortes, il faut augmenter les aides. Pareil pour les contrôles fiscaux.
Segment :
Pareil pour les contrôles fiscaux.
Clarifications :
A- Les contrôles fiscaux doivent être renforcés.
B- Les contrôles fiscaux doivent être renforcés car les inégalités sont trop fortes.
Réponse : B

Exemple 3 (égalité) :
Texte :
Baisser les indemnités des parlementaires.
Segment :
Baisser les indemnités des parlementaires.
Clarifications :
A- Les indemnités des parlementaires doivent être baissées.
B- Baisser les indemnités des parlementaires.
Réponse : ÉGALITÉ)";

const char* kClarifJudgeEn =
    R"(### Role
You are an expert in rewriting and clarification. Your task is to judge the clarity of a given text.

### Strict instructions
The user will give you a text, a segment of that text (which may potentially be the entire text), and two clarifications, A and B, of that segment.
A clarification must transform the initial text into a clear and self-sufficient text that can be understood without the context of the initial text.
This clarification may add this context if it is contained in the initial text and rephrase the segment. However, it must not add justifications if the text does not mention them. You must judge which of the two clarifications is the best.
Answer ONLY with "A", "B", or "TIE". Answer "TIE" only if there is no difference between the two. Prefer "A" or "B".

### Reference examples:
Example 1 (adding justification):
Text:
I don't understand how anyone can be so out of touch with reality. THE PRESIDENT'S SALARY MUST BE REDUCED!!
Segment:
THE PRESIDENT'S SALARY MUST BE REDUCED!!
Clarifications:
A- The president's salary must be lowered.
B- The president's salary must be lowered to limit public spending.
Answer: A

Example 2 (one of the two adds important context):
Text:
Inequalities are too great; aid must be increased. The same goes for tax audits.
Segment:
The same applies to tax control.
Clarifications:
A- Tax control must be strengthened.
B- Tax control must be strengthened because inequality is too high.
Answer: B

Example 3 (equality):
Text:
Lower the allowances of parliamentarians.
Segment:
Lower the allowances of parliamentarians.
Clarifications:
A- The allowances of parliamentarians must be lowered.
B- Lower the allowances of parliamentarians.
Answer: TIE)";

const char* kClusterJudgeFr =
    R"(### Rôle
Tu es un juge expert de la cohérence thématique. Ta tâche est de comparer deux groupes de textes (A et B).

### Consignes strictes
1. Un groupe est « meilleur » s'il est plus spécifique, plus précis, et si TOUS les textes traitent du même sujet avec la même approche.
2. Si un groupe contient des sujets différents (même vaguement liés à la politique ou à l'argent), il doit être pénalisé.
3. Réponds UNIQUEMENT par « A », « B » ou « ÉGALITÉ ». Ne réponds « ÉGALITÉ » que s'il n'y a aucune différence entre les deux. Privilégie « A » ou « B ». Aucune explication ne sera tolérée.

### Exemples de référence :
Exemple 1 (sujets divergents contre sujets identiques) :
A :
- « Réformer les enquêtes publiques »
- « Limiter les aides aux étrangers »
- « Changement climatique »
B :
- « Taxer le kérosène »
- « Taxer les entreprises polluantes »
Verdict : B

Exemple 2 (sujets proches mais différents contre sujets identiques) :
A :
- « Droits de succession et de donation »
- « Coût des maisons de retraite / EHPAD »
B :
- « Supprimer les indemnités des anciens présidents »
- « Réduire les avantages des anciens présidents »
Verdict : B

Exemple 3 (cohérence totale des deux côtés) :
A :
- « Légaliser le cannabis »
- « Vendre le cannabis en pharmacie »
B :
- « Augmenter le SMIC »
- « Relever le salaire minimum »
Verdict : ÉGALITÉ)";

const char* kClusterJudgeEn =
    R"(### Role
You are an expert judge of thematic consistency. Your task is to compare two clusters of texts (A and B).

### Strict instructions
1. A group is "better" if it is more specific, more precise, and if ALL texts deal with the same subject using the same approach.
2. If a group contains different subjects (even if they are vaguely related to politics or money), it must be penalized.
3. Respond ONLY with "A", "B", or "TIE". Respond with "TIE" only if there is no difference between the two. Give preference to "A" or "B". No explanations will be tolerated.

### Reference examples:
Example 1 (Divergent topics vs. Identical topics):
A:
- "Reform public inquiries"
- "Limit aid to foreigners"
- "Climate change"
B:
- "Tax kerosene"
- "Tax polluting companies"
Verdict: B

Example 2 (Similar but different topics vs. Identical topics):
A:
- "Inheritance and estate taxes"
- "Cost of retirement homes/nursing homes"
B:
- "Eliminate compensation for former presidents"
- "Reduce benefits for former presidents"
Verdict: B

Example 3 (Total consistency on both sides):
A:
- "Legalize cannabis"
- "Sell cannabis in pharmacies"
B:
- "Increase the minimum wage"
- "Raise the minimum wage"
Verdict: TIE)";

// One-shot material shared by the extraction, detection and clarification
// examples.
const char* kExampleFr =
    "Il faut baisser les impôts des classes moyennes car elles paient pour tout. Et supprimer "
    "les privilèges des élus.";
const char* kExampleEn =
    "The taxes of the middle classes must be lowered because they pay for everything. And remove "
    "the privileges of elected officials.";

PromptTemplate make(Stage stage, const char* language, const char* variant, const char* system,
                    std::string user, OneShotExample example) {
  PromptTemplate t;
  t.stage = stage;
  t.language = language;
  t.variant = variant;
  t.system = system;
  t.user = std::move(user);
  t.example = std::move(example);
  return t;
}

}  // namespace

std::vector<PromptTemplate> builtin_prompt_templates() {
  std::vector<PromptTemplate> out;
  out.push_back(make(
      Stage::kAuExtraction, "fr", kDefaultVariant, kAuExtractionFr, "Voici le texte :\n{{contribution}}",
      {{{ph::kContribution, kExampleFr}},
       "- Il faut baisser les impôts des classes moyennes car elles paient pour tout.\n"
       "- supprimer les privilèges des élus."}));
  out.push_back(make(
      Stage::kAuExtraction, "en", kDefaultVariant, kAuExtractionEn, "Here is the text:\n{{contribution}}",
      {{{ph::kContribution, kExampleEn}},
       "- The taxes of the middle classes must be lowered because they pay for everything.\n"
       "- remove the privileges of elected officials."}));

  out.push_back(make(
      Stage::kAsDetection, "fr", kDefaultVariant, kAsDetectionFr,
      "Texte original :\n{{contribution}}\n\nSegment :\n{{argumentative unit}}",
      {{{ph::kContribution, kExampleFr},
        {ph::kUnit, "Il faut baisser les impôts des classes moyennes car elles paient pour tout."}},
       "- [SOLUTION] Il faut baisser les impôts des classes moyennes\n"
       "- [PRÉMISSE] car elles paient pour tout."}));
  out.push_back(make(
      Stage::kAsDetection, "en", kDefaultVariant, kAsDetectionEn,
      "Original text:\n{{contribution}}\n\nSegment:\n{{argumentative unit}}",
      {{{ph::kContribution, kExampleEn},
        {ph::kUnit, "The taxes of the middle classes must be lowered because they pay for everything."}},
       "- [SOLUTION] The taxes of the middle classes must be lowered\n"
       "- [PREMISE] because they pay for everything."}));

  out.push_back(make(
      Stage::kClarification, "fr", kPipelineVariant, kClarificationFr,
      "Texte original :\n{{contribution}}\n\nSegment à clarifier :\n{{argumentative unit}}",
      {{{ph::kContribution, kExampleFr}, {ph::kUnit, "supprimer les privilèges des élus."}},
       "Il faut supprimer les privilèges des élus."}));
  out.push_back(make(
      Stage::kClarification, "en", kPipelineVariant, kClarificationEn,
      "Original text:\n{{contribution}}\n\nSegment to be clarified:\n{{argumentative unit}}",
      {{{ph::kContribution, kExampleEn}, {ph::kUnit, "remove the privileges of elected officials."}},
       "The privileges of elected officials must be removed."}));

  out.push_back(make(
      Stage::kClarification, "fr", kAnnotationVariant, kAnnotationFr,
      "Étant donné l'opinion :\n{{contribution}}\n\nsur le thème {{theme}}\n\n"
      "Extrais, en une phrase, l'argument sous-jacent composé de :\n"
      "- Constats : {{statements}}\n- Arguments : {{premises}}\n- Solutions : {{solutions}}",
      {{{ph::kContribution, kExampleFr},
        {ph::kTheme, "La fiscalité et les dépenses publiques"},
        {ph::kStatements, ""},
        {ph::kPremises, "car elles paient pour tout."},
        {ph::kSolutions, "Il faut baisser les impôts des classes moyennes"}},
       "Il faut baisser les impôts des classes moyennes, car elles paient pour tout."}));
  out.push_back(make(
      Stage::kClarification, "en", kAnnotationVariant, kAnnotationEn,
      "Given the opinion:\n{{contribution}}\n\non the topic {{theme}}\n\n"
      "Extract, in one sentence, the underlying argument consisting of:\n"
      "- Statements: {{statements}}\n- Arguments: {{premises}}\n- Solutions: {{solutions}}",
      {{{ph::kContribution, kExampleEn},
        {ph::kTheme, "Taxation and Public Spending"},
        {ph::kStatements, ""},
        {ph::kPremises, "because they pay for everything."},
        {ph::kSolutions, "The taxes of the middle classes must be lowered"}},
       "The taxes of the middle classes must be lowered, because they pay for everything."}));

  out.push_back(make(
      Stage::kClarifJudge, "fr", kDefaultVariant, kClarifJudgeFr,
      "Texte :\n{{contribution}}\nSegment :\n{{argumentative unit}}\nClarifications :\n"
      "A- {{clarification_a}}\nB- {{clarification_b}}\nRéponse :",
      {{{ph::kContribution, "Il faut taxer le kérosène, les avions polluent trop."},
        {ph::kUnit, "Il faut taxer le kérosène"},
        {ph::kClarificationA, "Le kérosène doit être taxé pour financer les retraites."},
        {ph::kClarificationB, "Le kérosène doit être taxé car les avions polluent trop."}},
       "B"}));
  out.push_back(make(
      Stage::kClarifJudge, "en", kDefaultVariant, kClarifJudgeEn,
      "Text:\n{{contribution}}\nSegment:\n{{argumentative unit}}\nClarifications:\n"
      "A- {{clarification_a}}\nB- {{clarification_b}}\nAnswer:",
      {{{ph::kContribution, "Kerosene must be taxed, planes pollute too much."},
        {ph::kUnit, "Kerosene must be taxed"},
        {ph::kClarificationA, "Kerosene must be taxed to fund pensions."},
        {ph::kClarificationB, "Kerosene must be taxed because planes pollute too much."}},
       "B"}));

  out.push_back(make(
      Stage::kClusterJudge, "fr", kDefaultVariant, kClusterJudgeFr,
      "A :\n{{cluster_a}}\nB :\n{{cluster_b}}\nVerdict :",
      {{{ph::kClusterA, "- « Supprimer le Sénat »\n- « Réduire le nombre de sénateurs »"},
        {ph::kClusterB, "- « Supprimer le Sénat »\n- « Baisser la TVA »"}},
       "A"}));
  out.push_back(make(
      Stage::kClusterJudge, "en", kDefaultVariant, kClusterJudgeEn,
      "A:\n{{cluster_a}}\nB:\n{{cluster_b}}\nVerdict:",
      {{{ph::kClusterA, "- \"Abolish the Senate\"\n- \"Reduce the number of senators\""},
        {ph::kClusterB, "- \"Abolish the Senate\"\n- \"Lower VAT\""}},
       "A"}));
  return out;
}

}  // namespace clarify::llm
