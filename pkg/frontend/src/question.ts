/** Question dialog model: prompt, optional image, one button per option.
 *
 * Buttons lock after the first click until the adjudication (`answered`)
 * arrives; a wrong answer shows its failure state briefly before the
 * dialog closes and the turn badge moves on.
 */

import type { QuestionPayload } from "./protocol.js";

export interface QuestionDialogView {
  prompt: string;
  imageUrl: string | null;
  options: string[];
  buttonsEnabled: boolean;
  outcome: "pending" | "submitted" | "correct" | "wrong";
}

export class QuestionDialog {
  private view: QuestionDialogView | null = null;

  open(question: QuestionPayload, assetBase = "/assets/"): QuestionDialogView {
    this.view = {
      prompt: question.prompt,
      imageUrl: question.image ? assetBase + question.image : null,
      options: [...question.options],
      buttonsEnabled: true,
      outcome: "pending",
    };
    return this.view;
  }

  /** Returns the option to send, or null when a click must be ignored. */
  choose(option: number): number | null {
    if (!this.view || !this.view.buttonsEnabled) return null;
    if (option < 0 || option >= this.view.options.length) return null;
    this.view.buttonsEnabled = false;
    this.view.outcome = "submitted";
    return option;
  }

  adjudicate(correct: boolean): void {
    if (!this.view) return;
    this.view.outcome = correct ? "correct" : "wrong";
  }

  close(): void {
    this.view = null;
  }

  get current(): QuestionDialogView | null {
    return this.view;
  }
}
